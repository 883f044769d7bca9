#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "fishrepro/io.hpp"
#include "fishrepro/metrics.hpp"

using namespace fishrepro;

namespace {

Pose3D world_pose(std::vector<Eigen::Vector3d> joints) {
  Pose3D p;
  p.frame = PoseFrame::world;
  p.joints = std::move(joints);
  return p;
}

Pose3D offset(const Pose3D& pose, const Eigen::Vector3d& d) {
  Pose3D out = pose;
  for (auto& j : out.joints) j += d;
  return out;
}

// Three hand-computed records (J = 4, root 0) shared with the acceptance
// suite:
//   r1: prediction == GT                         -> errors {0,0,0,0}
//   r2: per-joint offsets 0/100/200/100 mm       -> A-MPJPE 100, PCK 75
//   r3: constant 50 mm shift (pure root error)   -> A-MPJPE 50, MPJPE 0
std::vector<EvaluationRecord> fixture_records(const std::string& label) {
  const Pose3D g1 = world_pose({{0, 0, 3000}, {100, 0, 3000},
                                {0, 200, 3000}, {50, 50, 3200}});
  const Pose3D g2 = world_pose({{500, 0, 2000}, {600, 0, 2000},
                                {500, 300, 2100}, {400, -100, 2000}});
  const Pose3D g3 = world_pose({{-300, 0, 4000}, {-200, 50, 4100},
                                {-400, -50, 3900}, {-300, 100, 4000}});

  Pose3D p2 = g2;
  p2.joints[1] += Eigen::Vector3d(100, 0, 0);
  p2.joints[2] += Eigen::Vector3d(0, 200, 0);
  p2.joints[3] += Eigen::Vector3d(0, 0, 100);

  std::vector<EvaluationRecord> recs(3);
  recs[0] = {"r1", g1, g1, 57.0, 55.0, label};
  recs[1] = {"r2", g2, p2, 5.0, 4.0, label};
  recs[2] = {"r3", g3, offset(g3, {50, 0, 0}), 120.0, 118.0, label};
  return recs;
}

}  // namespace

TEST_CASE("relative alignment subtracts the root from every joint") {
  const Pose3D pose = world_pose({{10, 20, 30}, {110, 20, 30}, {10, -80, 30}});
  const Pose3D rel = relative_align(pose, 0);
  CHECK(rel.joints[0].norm() == 0.0);
  CHECK((rel.joints[1] - Eigen::Vector3d(100, 0, 0)).norm() == 0.0);

  // Already root-centered poses are unchanged.
  const Pose3D again = relative_align(rel, 0);
  for (std::size_t k = 0; k < rel.joints.size(); ++k)
    CHECK(again.joints[k] == rel.joints[k]);

  // Translation invariance.
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> c(-500.0, 500.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d d(c(rng), c(rng), c(rng));
    const Pose3D shifted = relative_align(offset(pose, d), 0);
    const Pose3D base = relative_align(pose, 0);
    for (std::size_t k = 0; k < base.joints.size(); ++k)
      REQUIRE((shifted.joints[k] - base.joints[k]).norm() < 1e-12);
  }

  CHECK_THROWS_AS((void)relative_align(pose, 3), std::invalid_argument);
}

TEST_CASE("mpjpe averages per-joint errors") {
  Pose3D gt = world_pose({});
  for (int k = 0; k < 10; ++k)
    gt.joints.emplace_back(100.0 * k, 50.0 * k, 2000.0);
  CHECK(mpjpe_mm(gt, gt, true, 0) == 0.0);
  CHECK(mpjpe_mm(gt, gt, false, 0) == 0.0);

  Pose3D pred = gt;
  pred.joints[7] += Eigen::Vector3d(0, 100, 0);  // root untouched
  CHECK(mpjpe_mm(gt, pred, true, 0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(mpjpe_mm(gt, pred, false, 0) == doctest::Approx(10.0).epsilon(1e-12));

  // Scalar-loop oracle on random poses.
  std::mt19937_64 rng(409);
  std::uniform_real_distribution<double> c(-800.0, 800.0);
  for (int trial = 0; trial < 50; ++trial) {
    Pose3D a = world_pose({}), b = world_pose({});
    for (int k = 0; k < 17; ++k) {
      a.joints.emplace_back(c(rng), c(rng), c(rng));
      b.joints.emplace_back(c(rng), c(rng), c(rng));
    }
    double sum = 0.0;
    for (int k = 0; k < 17; ++k) sum += (a.joints[k] - b.joints[k]).norm();
    REQUIRE(std::abs(mpjpe_mm(a, b, true, 0) - sum / 17.0) < 1e-9);
  }

  Pose3D short_pose = world_pose({{0, 0, 0}});
  CHECK_THROWS_AS((void)mpjpe_mm(gt, short_pose, true, 0),
                  std::invalid_argument);
}

TEST_CASE("relative mpjpe ignores constant offsets") {
  std::mt19937_64 rng(419);
  std::uniform_real_distribution<double> c(-400.0, 400.0);
  Pose3D gt = world_pose({});
  Pose3D pred = world_pose({});
  for (int k = 0; k < 12; ++k) {
    gt.joints.emplace_back(c(rng), c(rng), c(rng) + 2000.0);
    pred.joints.emplace_back(c(rng), c(rng), c(rng) + 2000.0);
  }
  const double base = mpjpe_mm(gt, pred, false, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector3d d(c(rng), c(rng), c(rng));
    REQUIRE(std::abs(mpjpe_mm(gt, offset(pred, d), false, 0) - base) < 1e-9);
    REQUIRE(std::abs(mpjpe_mm(offset(gt, d), pred, false, 0) - base) < 1e-9);
  }
}

TEST_CASE("pck applies a strict threshold") {
  Pose3D gt = world_pose({});
  for (int k = 0; k < 4; ++k) gt.joints.emplace_back(0, 0, 1000.0 + k);
  CHECK(pck_pct(gt, gt, 150.0, true, 0) == 100.0);

  Pose3D all150 = gt;
  for (auto& j : all150.joints) j += Eigen::Vector3d(150.0, 0, 0);
  CHECK(pck_pct(gt, all150, 150.0, true, 0) == 0.0);

  Pose3D half = gt;
  half.joints[0] += Eigen::Vector3d(100, 0, 0);
  half.joints[1] += Eigen::Vector3d(0, 100, 0);
  half.joints[2] += Eigen::Vector3d(200, 0, 0);
  half.joints[3] += Eigen::Vector3d(0, 0, 200);
  CHECK(pck_pct(gt, half, 150.0, true, 0) == 50.0);

  // Monotone in the threshold.
  double prev = 0.0;
  for (const double thr : {50.0, 100.0, 150.0, 201.0, 500.0}) {
    const double v = pck_pct(gt, half, thr, true, 0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("mpja binning partitions the records") {
  const std::vector<EvaluationRecord> recs = fixture_records("DS");
  std::vector<const EvaluationRecord*> ptrs;
  for (const auto& r : recs) ptrs.push_back(&r);
  EvalOptions opt;
  const std::vector<BinSummary> bins = bin_by_mpja(ptrs, opt);
  REQUIRE(bins.size() == 18);

  std::size_t total = 0;
  for (const auto& b : bins) total += b.summary.count;
  CHECK(total == recs.size());

  CHECK(bins[5].bin_lo_deg == 50.0);   // 57 deg -> [50, 60)
  CHECK(bins[5].summary.count == 1);
  CHECK(bins[0].summary.count == 1);   // 5 deg
  CHECK(bins[12].summary.count == 1);  // 120 deg
  CHECK(bins[17].summary.count == 0);  // empty bins still emitted

  // Per-bin metrics equal the metric of the manually filtered subset.
  const std::vector<const EvaluationRecord*> only_r2 = {&recs[1]};
  const MetricSummary manual = summarize(only_r2, opt);
  CHECK(bins[0].summary.mpjpe_mm == manual.mpjpe_mm);
  CHECK(bins[0].summary.a_mpjpe_mm == manual.a_mpjpe_mm);
}

TEST_CASE("the three-record fixture matches its hand-computed table") {
  const std::vector<EvaluationRecord> recs = fixture_records("DS");
  std::vector<const EvaluationRecord*> ptrs;
  for (const auto& r : recs) ptrs.push_back(&r);
  EvalOptions opt;
  const MetricSummary s = summarize(ptrs, opt);

  // Pooled over 12 joints: errors {0 x4}, {0,100,200,100}, {50 x4}.
  CHECK(std::abs(s.a_mpjpe_mm - 50.0) < 1e-9);
  CHECK(std::abs(s.mpjpe_mm - 100.0 / 3.0) < 1e-9);
  CHECK(std::abs(s.a_pck150_pct - 100.0 * 11.0 / 12.0) < 1e-9);
  CHECK(std::abs(s.pck150_pct - 100.0 * 11.0 / 12.0) < 1e-9);
  CHECK(s.count == 3);
}

TEST_CASE("identical predictions give zero error across all bins") {
  std::vector<EvaluationRecord> recs = fixture_records("DS");
  for (auto& r : recs) r.pred_pose = r.gt_pose;
  const EvalReport report = evaluate_records(recs, EvalOptions{});
  CHECK(report.overall.overall.mpjpe_mm == 0.0);
  CHECK(report.overall.overall.a_mpjpe_mm == 0.0);
  CHECK(report.overall.overall.pck150_pct == 100.0);
  for (const auto& bin : report.overall.curve)
    if (bin.summary.count > 0) CHECK(bin.summary.a_mpjpe_mm == 0.0);
}

TEST_CASE("hybrid thresholds at the extremes reduce to single projections") {
  std::vector<EvaluationRecord> recs = fixture_records("DS");
  // A distinct PH prediction set for the same ids.
  for (EvaluationRecord rec : fixture_records("PH")) {
    for (auto& j : rec.pred_pose.joints) j += Eigen::Vector3d(0, 30, 0);
    recs.push_back(std::move(rec));
  }
  EvalOptions opt;
  opt.alpha_ts = {0.0, 110.0, 180.0};
  const EvalReport report = evaluate_records(recs, opt);

  const MetricSummary& ds = report.labels.at("DS").overall;
  const MetricSummary& ph = report.labels.at("PH").overall;
  CHECK(ds.a_mpjpe_mm != ph.a_mpjpe_mm);

  for (const auto& h : report.hybrid) {
    if (h.alpha_t_deg == 0.0) {
      // angle >= 0 always: DS everywhere, bitwise identical summary.
      CHECK(h.result.overall.mpjpe_mm == ds.mpjpe_mm);
      CHECK(h.result.overall.a_mpjpe_mm == ds.a_mpjpe_mm);
      CHECK(h.result.overall.pck150_pct == ds.pck150_pct);
      CHECK(h.result.overall.a_pck150_pct == ds.a_pck150_pct);
    } else if (h.alpha_t_deg == 180.0) {
      CHECK(h.result.overall.mpjpe_mm == ph.mpjpe_mm);
      CHECK(h.result.overall.a_mpjpe_mm == ph.a_mpjpe_mm);
    }
  }
  // mbba/mpja fixtures straddle 110: r3 (118/120) -> DS, others -> PH.
  CHECK(report.h_agreement.at(110.0) == 1.0);
}

TEST_CASE("evaluate_run joins files by id and tolerates small mismatches") {
  const std::vector<EvaluationRecord> ds = fixture_records("DS");

  std::vector<PoseRecord> gt_records, pred_records;
  for (const auto& rec : ds) {
    PoseRecord g;
    g.id = rec.id;
    g.pose = rec.gt_pose;
    g.mpja_deg = rec.mpja_deg;
    g.mbba_deg = rec.mbba_deg;
    gt_records.push_back(g);

    PoseRecord p;
    p.id = rec.id;
    p.pose = rec.pred_pose;
    p.projection = "DS";
    pred_records.push_back(p);
  }
  write_pose_jsonl("eval_gt.jsonl", gt_records);
  write_pose_jsonl("eval_pred.jsonl", pred_records);

  EvalOptions opt;
  const EvalReport report = evaluate_run("eval_gt.jsonl", "eval_pred.jsonl",
                                         "", opt);
  CHECK(report.skipped == 0);
  CHECK(std::abs(report.overall.overall.a_mpjpe_mm - 50.0) < 1e-9);

  // An unmatched prediction id beyond the tolerance is a hard error.
  PoseRecord orphan = pred_records[0];
  orphan.id = "missing";
  pred_records.push_back(orphan);
  write_pose_jsonl("eval_pred.jsonl", pred_records);
  CHECK_THROWS_AS((void)evaluate_run("eval_gt.jsonl", "eval_pred.jsonl", "",
                                     opt),
                  std::runtime_error);

  std::remove("eval_gt.jsonl");
  std::remove("eval_pred.jsonl");
}

TEST_CASE("curves csv carries the pinned column layout") {
  const std::vector<EvaluationRecord> recs = fixture_records("DS");
  std::vector<const EvaluationRecord*> ptrs;
  for (const auto& r : recs) ptrs.push_back(&r);
  EvalOptions opt;
  write_curves_csv("curves_test.csv", bin_by_mpja(ptrs, opt));

  std::ifstream in("curves_test.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "bin_lo_deg,count,mpjpe_mm,a_mpjpe_mm,pck150,a_pck150");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 18);
  std::remove("curves_test.csv");
}
