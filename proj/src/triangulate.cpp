#include "fishrepro/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "fishrepro/detail/camera_math.hpp"

namespace fishrepro {

const SkeletonTopology& default_skeleton17() {
  static const SkeletonTopology topo = [] {
    SkeletonTopology t;
    t.num_joints = 17;
    t.root_index = 0;
    t.joint_names = {"pelvis",     "spine",   "neck",    "head",
                     "head_top",   "l_shoulder", "l_elbow", "l_wrist",
                     "r_shoulder", "r_elbow", "r_wrist", "l_hip",
                     "l_knee",     "l_ankle", "r_hip",   "r_knee",
                     "r_ankle"};
    t.bones = {{0, 1},  {1, 2},  {2, 3},  {3, 4},  {2, 5},  {5, 6},
               {6, 7},  {2, 8},  {8, 9},  {9, 10}, {0, 11}, {11, 12},
               {12, 13}, {0, 14}, {14, 15}, {15, 16}};
    // Left/right bone pairs: clavicle, upper arm, forearm, hip, femur, shin.
    t.symmetric_pairs = {{4, 7}, {5, 8}, {6, 9}, {10, 13}, {11, 14}, {12, 15}};
    t.bone_range_mm = {{120, 420}, {120, 420}, {80, 300},  {80, 320},
                       {100, 320}, {180, 450}, {160, 400}, {100, 320},
                       {180, 450}, {160, 400}, {50, 260},  {250, 660},
                       {250, 660}, {50, 260},  {250, 660}, {250, 660}};
    return t;
  }();
  return topo;
}

namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Ceres-style Huber on the squared residual norm s, delta in px.
double huber_rho(double s, double delta) {
  const double b = delta * delta;
  return s <= b ? s : 2.0 * delta * std::sqrt(s) - b;
}
double huber_weight(double s, double delta) {
  const double b = delta * delta;
  return s <= b ? 1.0 : delta / std::sqrt(s);
}

bool project_point(const CameraModel& cam, const Eigen::Vector3d& p,
                   Eigen::Vector2d& pixel) {
  const Intrinsics& in = cam.intr;
  double u = 0.0, v = 0.0;
  bool dom = false;
  switch (cam.kind) {
    case CameraKind::PH:
      dom = detail::project_ph(in.fx, in.fy, in.cx, in.cy, p.x(), p.y(), p.z(), u, v);
      break;
    case CameraKind::EF:
      dom = detail::project_ef(in.fx, in.fy, in.cx, in.cy, p.x(), p.y(), p.z(), u, v);
      break;
    case CameraKind::DS: {
      const auto dc = detail::ds_constants(cam.xi, cam.alpha);
      dom = detail::project_ds(in.fx, in.fy, in.cx, in.cy, cam.xi, cam.alpha,
                               dc.w2, p.x(), p.y(), p.z(), u, v);
      break;
    }
    case CameraKind::CC:
      dom = detail::project_cc(in.fx, in.fy, in.cx, in.cy, p.x(), p.y(), p.z(), u, v);
      break;
    case CameraKind::EC:
      dom = detail::project_ec(in.fx, in.fy, in.cx, in.cy, p.x(), p.y(), p.z(), u, v);
      break;
  }
  pixel = {u, v};
  return dom;
}

// d(pixel)/d(p_cam): analytic where the projection differentiates cleanly
// (PH, DS), central differences for the branchy cylindrical/equidistant
// models.
bool project_with_jac(const CameraModel& cam, const Eigen::Vector3d& p,
                      Eigen::Vector2d& pixel, Mat23* jac) {
  if (!project_point(cam, p, pixel)) return false;
  if (jac == nullptr) return true;

  const Intrinsics& in = cam.intr;
  switch (cam.kind) {
    case CameraKind::PH: {
      const double iz = 1.0 / p.z();
      (*jac)(0, 0) = in.fx * iz;
      (*jac)(0, 1) = 0.0;
      (*jac)(0, 2) = -in.fx * p.x() * iz * iz;
      (*jac)(1, 0) = 0.0;
      (*jac)(1, 1) = in.fy * iz;
      (*jac)(1, 2) = -in.fy * p.y() * iz * iz;
      return true;
    }
    case CameraKind::DS: {
      const double x = p.x(), y = p.y(), z = p.z();
      const double r2 = x * x + y * y;
      const double d1 = std::sqrt(r2 + z * z);
      const double k = cam.xi * d1 + z;
      const double d2 = std::sqrt(r2 + k * k);
      const double denom = cam.alpha * d2 + (1.0 - cam.alpha) * k;
      const Eigen::Vector3d dd1 = Eigen::Vector3d(x, y, z) / d1;
      const Eigen::Vector3d dk = cam.xi * dd1 + Eigen::Vector3d(0, 0, 1);
      const Eigen::Vector3d dd2 = (Eigen::Vector3d(x, y, 0) + k * dk) / d2;
      const Eigen::Vector3d dD = cam.alpha * dd2 + (1.0 - cam.alpha) * dk;
      const double inv = 1.0 / denom;
      jac->row(0) = in.fx * (inv * Eigen::Vector3d::UnitX() -
                             (x * inv * inv) * dD);
      jac->row(1) = in.fy * (inv * Eigen::Vector3d::UnitY() -
                             (y * inv * inv) * dD);
      return true;
    }
    default: {
      for (int d = 0; d < 3; ++d) {
        const double h = 1e-6 * std::max(1.0, std::abs(p[d]));
        Eigen::Vector3d lo = p, hi = p;
        lo[d] -= h;
        hi[d] += h;
        Eigen::Vector2d plo, phi;
        if (!project_point(cam, hi, phi) || !project_point(cam, lo, plo))
          return false;
        jac->col(d) = (phi - plo) / (2.0 * h);
      }
      return true;
    }
  }
}

}  // namespace

bool project_jacobian(const CameraModel& cam, const Eigen::Vector3d& p_cam,
                      Eigen::Vector2d& pixel,
                      Eigen::Matrix<double, 2, 3>& jacobian) {
  return project_with_jac(cam, p_cam, pixel, &jacobian);
}

namespace {

struct Usable {
  const CameraModel* camera;
  const Extrinsics* extrinsics;
  Eigen::Vector2d keypoint;
  double confidence;
};

// Midpoint of the closest-approach segment between the two rays; nullopt
// when the rays carry no parallax.
std::optional<Eigen::Vector3d> ray_pair_midpoint(const Usable& a,
                                                 const Usable& b) {
  const UnprojectResult ra = unproject(*a.camera, a.keypoint);
  const UnprojectResult rb = unproject(*b.camera, b.keypoint);
  if (!ra.valid || !rb.valid) return std::nullopt;
  const Eigen::Vector3d d1 = a.extrinsics->rotation * ra.ray;
  const Eigen::Vector3d d2 = b.extrinsics->rotation * rb.ray;
  const Eigen::Vector3d o1 = a.extrinsics->translation;
  const Eigen::Vector3d o2 = b.extrinsics->translation;

  const double d11 = d1.dot(d1), d22 = d2.dot(d2), d12 = d1.dot(d2);
  const double det = d11 * d22 - d12 * d12;
  if (det < 1e-12) return std::nullopt;
  const Eigen::Vector3d w = o2 - o1;
  const double s = (w.dot(d1) * d22 - w.dot(d2) * d12) / det;
  const double t = (w.dot(d1) * d12 - w.dot(d2) * d11) / det;
  return 0.5 * ((o1 + s * d1) + (o2 + t * d2));
}

std::optional<Eigen::Vector3d> init_from_rays(std::vector<Usable> usable) {
  std::stable_sort(usable.begin(), usable.end(),
                   [](const Usable& a, const Usable& b) {
                     return a.confidence > b.confidence;
                   });
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    for (std::size_t j = i + 1; j < usable.size(); ++j) {
      if (auto mid = ray_pair_midpoint(usable[i], usable[j])) return mid;
    }
  }
  return std::nullopt;
}

// Two residual rows for one observation of the world point X; returns the
// robust cost contribution.
double observation_residual(const Usable& ob, const Eigen::Vector3d& x_world,
                            Eigen::Vector2d& r_out, Mat23* jac_out) {
  const Eigen::Vector3d p_cam = ob.extrinsics->camera_from_world(x_world);
  Eigen::Vector2d pixel;
  Mat23 jac_cam;
  const bool ok =
      project_with_jac(*ob.camera, p_cam, pixel, jac_out ? &jac_cam : nullptr);
  if (!ok) {
    // Flat, large penalty keeps the solver away without a gradient cliff.
    r_out = {1e4, 1e4};
    if (jac_out) jac_out->setZero();
    return huber_rho(r_out.squaredNorm(), kHuberDeltaPx);
  }
  Eigen::Vector2d r = ob.confidence * (pixel - ob.keypoint);
  const double s = r.squaredNorm();
  const double w = std::sqrt(huber_weight(s, kHuberDeltaPx));
  r_out = w * r;
  if (jac_out)
    *jac_out = (w * ob.confidence) *
               (jac_cam * ob.extrinsics->rotation.transpose());
  return huber_rho(s, kHuberDeltaPx);
}

}  // namespace

PointTriangulation triangulate_point(const std::vector<PointObservation>& obs,
                                     const LMOptions& options) {
  std::vector<Usable> usable;
  for (const auto& o : obs) {
    if (o.confidence > 0.0)
      usable.push_back({&o.camera, &o.extrinsics, o.keypoint, o.confidence});
  }
  if (usable.size() < 2)
    throw std::runtime_error("triangulate_point: fewer than 2 usable views");

  const auto init = init_from_rays(usable);
  if (!init)
    throw std::runtime_error(
        "triangulate_point: rank-deficient geometry (rays have no parallax)");

  const auto fn = [&usable](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                            Eigen::MatrixXd* jac) {
    const Eigen::Vector3d pt(x(0), x(1), x(2));
    r.resize(2 * static_cast<Eigen::Index>(usable.size()));
    if (jac) jac->setZero(r.size(), 3);
    double cost = 0.0;
    for (std::size_t i = 0; i < usable.size(); ++i) {
      Eigen::Vector2d ri;
      Mat23 ji;
      cost += observation_residual(usable[i], pt, ri, jac ? &ji : nullptr);
      r.segment<2>(2 * i) = ri;
      if (jac) jac->block<2, 3>(2 * i, 0) = ji;
    }
    return cost;
  };

  Eigen::VectorXd x0(3);
  x0 << init->x(), init->y(), init->z();
  const LMResult lm = levenberg_marquardt(fn, x0, options);

  PointTriangulation out;
  out.point = {lm.x(0), lm.x(1), lm.x(2)};
  out.converged = lm.converged;
  out.iterations = lm.iterations;
  out.cost = lm.cost;
  out.cost_history = lm.cost_history;
  return out;
}

SkeletonTriangulation triangulate_skeleton(
    const std::vector<ViewObservation>& views, const SkeletonTopology& topology,
    double lambda_sym, const LMOptions& options) {
  const std::size_t j = topology.num_joints;
  if (j == 0) throw std::invalid_argument("topology has no joints");
  for (const auto& view : views)
    if (view.keypoints2d.size() != j || view.confidence.size() != j)
      throw std::invalid_argument("view keypoints/confidence must have J entries");
  for (const auto& bone : topology.bones)
    if (bone[0] < 0 || bone[1] < 0 || bone[0] >= static_cast<int>(j) ||
        bone[1] >= static_cast<int>(j))
      throw std::invalid_argument("bone index out of range");
  if (!(lambda_sym >= 0.0))
    throw std::invalid_argument("lambda_sym must be >= 0");

  // Per-joint observations and the >=2-view usability rule.
  std::vector<std::vector<Usable>> per_joint(j);
  for (const auto& view : views) {
    for (std::size_t k = 0; k < j; ++k) {
      if (view.confidence[k] > 0.0)
        per_joint[k].push_back({&view.camera, &view.extrinsics,
                                view.keypoints2d[k], view.confidence[k]});
    }
  }

  SkeletonTriangulation out;
  out.joint_valid.assign(j, 0);
  out.pose.frame = PoseFrame::world;
  out.pose.joints.assign(
      j, Eigen::Vector3d::Constant(std::numeric_limits<double>::quiet_NaN()));

  std::vector<int> param_of_joint(j, -1);
  std::vector<std::size_t> solved;
  for (std::size_t k = 0; k < j; ++k) {
    if (per_joint[k].size() < 2) continue;
    const auto init = init_from_rays(per_joint[k]);
    if (!init) continue;
    param_of_joint[k] = static_cast<int>(solved.size());
    solved.push_back(k);
    out.pose.joints[k] = *init;
    out.joint_valid[k] = 1;
  }
  if (solved.empty()) {
    out.converged = false;
    return out;
  }

  // Symmetry terms only between bones whose four endpoints are all solved.
  struct SymTerm {
    int li, lj, ri, rj;
  };
  std::vector<SymTerm> sym_terms;
  if (lambda_sym > 0.0) {
    for (const auto& pair : topology.symmetric_pairs) {
      const auto& bl = topology.bones.at(pair[0]);
      const auto& br = topology.bones.at(pair[1]);
      if (param_of_joint[bl[0]] >= 0 && param_of_joint[bl[1]] >= 0 &&
          param_of_joint[br[0]] >= 0 && param_of_joint[br[1]] >= 0)
        sym_terms.push_back({bl[0], bl[1], br[0], br[1]});
    }
  }

  const double sqrt_lambda = std::sqrt(lambda_sym);
  std::size_t n_obs = 0;
  for (const std::size_t k : solved) n_obs += per_joint[k].size();
  const Eigen::Index n_res =
      2 * static_cast<Eigen::Index>(n_obs) +
      static_cast<Eigen::Index>(sym_terms.size());

  const auto fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    r.resize(n_res);
    if (jac) jac->setZero(n_res, x.size());
    double cost = 0.0;
    Eigen::Index row = 0;
    for (std::size_t si = 0; si < solved.size(); ++si) {
      const Eigen::Vector3d pt = x.segment<3>(3 * si);
      for (const Usable& ob : per_joint[solved[si]]) {
        Eigen::Vector2d ri;
        Mat23 ji;
        cost += observation_residual(ob, pt, ri, jac ? &ji : nullptr);
        r.segment<2>(row) = ri;
        if (jac) jac->block<2, 3>(row, 3 * si) = ji;
        row += 2;
      }
    }
    for (const SymTerm& term : sym_terms) {
      const Eigen::Vector3d bl = x.segment<3>(3 * param_of_joint[term.li]) -
                                 x.segment<3>(3 * param_of_joint[term.lj]);
      const Eigen::Vector3d br = x.segment<3>(3 * param_of_joint[term.ri]) -
                                 x.segment<3>(3 * param_of_joint[term.rj]);
      const double ll = bl.norm(), lr = br.norm();
      const double res = sqrt_lambda * (ll - lr);
      r(row) = res;
      cost += res * res;
      if (jac && ll > 0.0 && lr > 0.0) {
        // Accumulate: symmetric bones may share an endpoint joint.
        const Eigen::Vector3d ul = bl / ll, ur = br / lr;
        jac->block<1, 3>(row, 3 * param_of_joint[term.li]) +=
            sqrt_lambda * ul.transpose();
        jac->block<1, 3>(row, 3 * param_of_joint[term.lj]) +=
            -sqrt_lambda * ul.transpose();
        jac->block<1, 3>(row, 3 * param_of_joint[term.ri]) +=
            -sqrt_lambda * ur.transpose();
        jac->block<1, 3>(row, 3 * param_of_joint[term.rj]) +=
            sqrt_lambda * ur.transpose();
      }
      row += 1;
    }
    return cost;
  };

  Eigen::VectorXd x0(3 * solved.size());
  for (std::size_t si = 0; si < solved.size(); ++si)
    x0.segment<3>(3 * si) = out.pose.joints[solved[si]];

  const LMResult lm = levenberg_marquardt(fn, x0, options);
  for (std::size_t si = 0; si < solved.size(); ++si)
    out.pose.joints[solved[si]] = lm.x.segment<3>(3 * si);
  out.converged = lm.converged;
  out.cost = lm.cost;
  out.cost_history = lm.cost_history;

  // Anatomy plausibility: bones outside their plausible range flag both
  // endpoint joints.
  if (topology.bone_range_mm.size() == topology.bones.size()) {
    for (std::size_t b = 0; b < topology.bones.size(); ++b) {
      const int a = topology.bones[b][0], c = topology.bones[b][1];
      if (!out.joint_valid[a] || !out.joint_valid[c]) continue;
      const double len = (out.pose.joints[a] - out.pose.joints[c]).norm();
      if (len < topology.bone_range_mm[b][0] ||
          len > topology.bone_range_mm[b][1]) {
        out.joint_valid[a] = 0;
        out.joint_valid[c] = 0;
      }
    }
  }
  return out;
}

}  // namespace fishrepro
