#include "fishrepro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "fishrepro/io.hpp"
#include "fishrepro/spatial.hpp"

namespace fishrepro {

Pose3D relative_align(const Pose3D& pose, std::size_t root_index) {
  if (root_index >= pose.joints.size())
    throw std::invalid_argument("relative_align: root index out of range");
  Pose3D out = pose;
  const Eigen::Vector3d root = pose.joints[root_index];
  for (auto& j : out.joints) j -= root;
  return out;
}

namespace {

void check_same_size(const Pose3D& gt, const Pose3D& pred) {
  if (gt.joints.size() != pred.joints.size() || gt.joints.empty())
    throw std::invalid_argument("poses must have the same nonzero joint count");
}

}  // namespace

double mpjpe_mm(const Pose3D& gt, const Pose3D& pred, bool absolute,
                std::size_t root_index) {
  check_same_size(gt, pred);
  Pose3D g_store, p_store;
  if (!absolute) {
    g_store = relative_align(gt, root_index);
    p_store = relative_align(pred, root_index);
  }
  const Pose3D& ga = absolute ? gt : g_store;
  const Pose3D& pa = absolute ? pred : p_store;
  double sum = 0.0;
  for (std::size_t k = 0; k < ga.joints.size(); ++k)
    sum += (ga.joints[k] - pa.joints[k]).norm();
  return sum / static_cast<double>(ga.joints.size());
}

double pck_pct(const Pose3D& gt, const Pose3D& pred, double threshold_mm,
               bool absolute, std::size_t root_index) {
  check_same_size(gt, pred);
  Pose3D g_store, p_store;
  if (!absolute) {
    g_store = relative_align(gt, root_index);
    p_store = relative_align(pred, root_index);
  }
  const Pose3D& ga = absolute ? gt : g_store;
  const Pose3D& pa = absolute ? pred : p_store;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < ga.joints.size(); ++k)
    if ((ga.joints[k] - pa.joints[k]).norm() < threshold_mm) ++correct;
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(ga.joints.size());
}

MetricSummary summarize(const std::vector<const EvaluationRecord*>& records,
                        const EvalOptions& opt) {
  MetricSummary s;
  s.count = records.size();
  if (records.empty()) return s;

  double err_rel = 0.0, err_abs = 0.0;
  std::size_t ok_rel = 0, ok_abs = 0, joints = 0;
  for (const EvaluationRecord* rec : records) {
    check_same_size(rec->gt_pose, rec->pred_pose);
    const Pose3D g_rel = relative_align(rec->gt_pose, opt.root_index);
    const Pose3D p_rel = relative_align(rec->pred_pose, opt.root_index);
    for (std::size_t k = 0; k < rec->gt_pose.joints.size(); ++k) {
      const double ea = (rec->gt_pose.joints[k] - rec->pred_pose.joints[k]).norm();
      const double er = (g_rel.joints[k] - p_rel.joints[k]).norm();
      err_abs += ea;
      err_rel += er;
      if (ea < opt.pck_threshold_mm) ++ok_abs;
      if (er < opt.pck_threshold_mm) ++ok_rel;
      ++joints;
    }
  }
  const double n = static_cast<double>(joints);
  s.mpjpe_mm = err_rel / n;
  s.a_mpjpe_mm = err_abs / n;
  s.pck150_pct = 100.0 * static_cast<double>(ok_rel) / n;
  s.a_pck150_pct = 100.0 * static_cast<double>(ok_abs) / n;
  return s;
}

std::vector<BinSummary> bin_by_mpja(
    const std::vector<const EvaluationRecord*>& records,
    const EvalOptions& opt) {
  const double width = opt.bin_width_deg;
  if (!(width > 0.0)) throw std::invalid_argument("bin width must be positive");
  const int n_bins = static_cast<int>(std::ceil(180.0 / width));

  std::vector<std::vector<const EvaluationRecord*>> bins(n_bins);
  for (const EvaluationRecord* rec : records) {
    if (std::isnan(rec->mpja_deg)) continue;
    int b = static_cast<int>(std::floor(rec->mpja_deg / width));
    b = std::clamp(b, 0, n_bins - 1);  // mpja == 180 lands in the last bin
    bins[b].push_back(rec);
  }

  std::vector<BinSummary> out(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    out[b].bin_lo_deg = b * width;
    out[b].summary = summarize(bins[b], opt);
  }
  return out;
}

namespace {

LabeledResult label_result(const std::vector<const EvaluationRecord*>& records,
                           const EvalOptions& opt) {
  LabeledResult r;
  r.overall = summarize(records, opt);
  r.curve = bin_by_mpja(records, opt);
  return r;
}

}  // namespace

EvalReport evaluate_records(const std::vector<EvaluationRecord>& records,
                            const EvalOptions& opt) {
  EvalReport report;
  report.total_records = records.size();

  // Deterministic order: records grouped by label, sorted by id.
  std::map<std::string, std::vector<const EvaluationRecord*>> by_label;
  std::vector<const EvaluationRecord*> all;
  for (const auto& rec : records) {
    by_label[rec.projection.empty() ? "ALL" : rec.projection].push_back(&rec);
    all.push_back(&rec);
  }
  auto id_less = [](const EvaluationRecord* a, const EvaluationRecord* b) {
    return a->id < b->id;
  };
  std::stable_sort(all.begin(), all.end(), id_less);
  for (auto& [label, recs] : by_label)
    std::stable_sort(recs.begin(), recs.end(), id_less);

  report.overall = label_result(all, opt);
  for (const auto& [label, recs] : by_label)
    report.labels[label] = label_result(recs, opt);

  // MPJA-vs-MBBA agreement of the H choice at each threshold; the paper's
  // claim that MBBA tracks MPJA is reported, never asserted.
  for (const double alpha_t : opt.alpha_ts) {
    std::size_t agree = 0, both = 0;
    for (const auto& rec : records) {
      if (std::isnan(rec.mpja_deg) || std::isnan(rec.mbba_deg)) continue;
      ++both;
      if (select_projection(rec.mpja_deg, alpha_t).kind ==
          select_projection(rec.mbba_deg, alpha_t).kind)
        ++agree;
    }
    report.h_agreement[alpha_t] =
        both > 0 ? static_cast<double>(agree) / static_cast<double>(both)
                 : std::numeric_limits<double>::quiet_NaN();
  }

  // Hybrid synthesis: per id pick the PH or DS record by the basis angle.
  const bool can_hybrid =
      by_label.count("PH") > 0 && by_label.count("DS") > 0;
  if (can_hybrid && !opt.alpha_ts.empty()) {
    std::map<std::string, const EvaluationRecord*> ph_by_id, ds_by_id;
    for (const auto* r : by_label.at("PH")) ph_by_id[r->id] = r;
    for (const auto* r : by_label.at("DS")) ds_by_id[r->id] = r;

    for (const double alpha_t : opt.alpha_ts) {
      for (const std::string& basis : {std::string("mbba"), std::string("mpja")}) {
        std::vector<const EvaluationRecord*> chosen;
        for (const auto& [id, ph_rec] : ph_by_id) {
          const auto ds_it = ds_by_id.find(id);
          if (ds_it == ds_by_id.end()) {
            ++report.skipped;
            continue;
          }
          const double angle =
              basis == "mbba" ? ph_rec->mbba_deg : ph_rec->mpja_deg;
          if (std::isnan(angle)) {
            ++report.skipped;
            continue;
          }
          const ProjectionChoice c = select_projection(angle, alpha_t);
          chosen.push_back(c.kind == CameraKind::PH ? ph_rec : ds_it->second);
        }
        HybridResult h;
        h.alpha_t_deg = alpha_t;
        h.basis = basis;
        h.result = label_result(chosen, opt);
        report.hybrid.push_back(std::move(h));
      }
    }
  }
  return report;
}

EvalReport evaluate_run(const std::string& gt_path,
                        const std::string& pred_path,
                        const std::string& camera_path,
                        const EvalOptions& opt) {
  const std::vector<PoseRecord> gt = read_pose_jsonl(gt_path);
  const std::vector<PoseRecord> pred = read_pose_jsonl(pred_path);

  std::optional<CameraFile> cam;
  if (!camera_path.empty()) cam = load_camera_file(camera_path);

  std::map<std::string, const PoseRecord*> gt_by_id;
  for (const auto& r : gt) gt_by_id[r.id] = &r;

  std::vector<EvaluationRecord> records;
  std::size_t skipped = 0;
  for (const auto& p : pred) {
    const auto it = gt_by_id.find(p.id);
    if (it == gt_by_id.end()) {
      ++skipped;
      continue;
    }
    const PoseRecord& g = *it->second;
    EvaluationRecord rec;
    rec.id = p.id;
    rec.gt_pose = g.pose;
    rec.gt_pose.frame = PoseFrame::world;
    rec.pred_pose = p.pose;
    rec.pred_pose.frame = PoseFrame::world;
    rec.projection = p.projection.value_or("ALL");

    if (g.mpja_deg) {
      rec.mpja_deg = *g.mpja_deg;
    } else {
      // Without a stored value, treat the GT pose as camera-frame (or map
      // through the camera file's extrinsics when present).
      Pose3D cam_pose = g.pose;
      cam_pose.frame = PoseFrame::camera;
      if (cam && cam->extrinsics)
        cam_pose = to_camera_frame(rec.gt_pose, *cam->extrinsics);
      rec.mpja_deg = mpja_deg(cam_pose);
    }
    if (g.mbba_deg) {
      rec.mbba_deg = *g.mbba_deg;
    } else if (g.bbox && cam) {
      rec.mbba_deg = mbba_deg(*g.bbox, cam->camera).angle_deg;
    }
    records.push_back(std::move(rec));
  }

  const std::size_t total = pred.size();
  if (total > 0 &&
      static_cast<double>(skipped) > opt.max_skip_fraction *
                                         static_cast<double>(total))
    throw std::runtime_error("evaluate_run: more than " +
                             std::to_string(static_cast<int>(
                                 opt.max_skip_fraction * 100)) +
                             "% of prediction records lack matching GT ids");

  EvalReport report = evaluate_records(records, opt);
  report.skipped += skipped;
  return report;
}

namespace {

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_curves_csv(const std::string& path,
                      const std::vector<BinSummary>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "bin_lo_deg,count,mpjpe_mm,a_mpjpe_mm,pck150,a_pck150\n";
  for (const auto& bin : curve) {
    out << csv_num(bin.bin_lo_deg) << ',' << bin.summary.count << ','
        << csv_num(bin.summary.mpjpe_mm) << ','
        << csv_num(bin.summary.a_mpjpe_mm) << ','
        << csv_num(bin.summary.pck150_pct) << ','
        << csv_num(bin.summary.a_pck150_pct) << '\n';
  }
}

namespace {

json summary_to_json(const MetricSummary& s) {
  json j;
  j["count"] = s.count;
  j["mpjpe_mm"] = s.mpjpe_mm;
  j["a_mpjpe_mm"] = s.a_mpjpe_mm;
  j["pck150_pct"] = s.pck150_pct;
  j["a_pck150_pct"] = s.a_pck150_pct;
  return j;
}

}  // namespace

void write_report_json(const std::string& path, const EvalReport& report) {
  json j;
  j["total_records"] = report.total_records;
  j["skipped"] = report.skipped;
  j["overall"] = summary_to_json(report.overall.overall);
  for (const auto& [label, res] : report.labels)
    j["labels"][label] = summary_to_json(res.overall);
  for (const auto& h : report.hybrid) {
    json hj = summary_to_json(h.result.overall);
    hj["alpha_t_deg"] = h.alpha_t_deg;
    hj["basis"] = h.basis;
    j["hybrid"].push_back(hj);
  }
  for (const auto& [alpha_t, rate] : report.h_agreement) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", alpha_t);
    j["h_choice_agreement"][key] = rate;
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace fishrepro
