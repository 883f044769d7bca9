#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fishrepro/types.hpp"

namespace fishrepro {

struct EvaluationRecord {
  std::string id;
  Pose3D gt_pose;    // world frame, mm
  Pose3D pred_pose;  // world frame, mm
  double mpja_deg = std::numeric_limits<double>::quiet_NaN();
  double mbba_deg = std::numeric_limits<double>::quiet_NaN();
  std::string projection;  // label: PH, EF, DS, CC, EC
};

struct MetricSummary {
  double mpjpe_mm = std::numeric_limits<double>::quiet_NaN();
  double a_mpjpe_mm = std::numeric_limits<double>::quiet_NaN();
  double pck150_pct = std::numeric_limits<double>::quiet_NaN();
  double a_pck150_pct = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;  // records
};

/// Subtracts the root joint from every joint.
Pose3D relative_align(const Pose3D& pose, std::size_t root_index);

/// Mean per-joint position error in mm; root-aligned first unless absolute.
double mpjpe_mm(const Pose3D& gt, const Pose3D& pred, bool absolute,
                std::size_t root_index);

/// Percentage of joints with error strictly below threshold_mm.
double pck_pct(const Pose3D& gt, const Pose3D& pred, double threshold_mm,
               bool absolute, std::size_t root_index);

struct BinSummary {
  double bin_lo_deg = 0.0;
  MetricSummary summary;
};

struct EvalOptions {
  std::vector<double> alpha_ts;  // hybrid thresholds, degrees
  std::size_t root_index = 0;
  double pck_threshold_mm = 150.0;
  double bin_width_deg = 10.0;
  double max_skip_fraction = 0.10;
};

/// Joints pooled over all records (J is constant per run, so this equals the
/// mean of per-record means).
MetricSummary summarize(const std::vector<const EvaluationRecord*>& records,
                        const EvalOptions& opt);

/// Partition by floor(mpja / bin_width); bins cover [0, 180] and empty bins
/// are emitted with count 0. Records with NaN mpja are excluded.
std::vector<BinSummary> bin_by_mpja(
    const std::vector<const EvaluationRecord*>& records,
    const EvalOptions& opt);

struct LabeledResult {
  MetricSummary overall;
  std::vector<BinSummary> curve;
};

struct HybridResult {
  double alpha_t_deg = 0.0;
  std::string basis;  // "mbba" or "mpja"
  LabeledResult result;
};

struct EvalReport {
  std::size_t total_records = 0;
  std::size_t skipped = 0;
  LabeledResult overall;
  std::map<std::string, LabeledResult> labels;
  std::vector<HybridResult> hybrid;
  std::map<double, double> h_agreement;  // alpha_t -> MPJA/MBBA choice agreement
};

/// Core evaluation over joined records. Hybrid summaries are synthesized per
/// alpha_t by picking each id's PH or DS record from the basis angle; they
/// require both labels to be present for an id, otherwise the id is skipped.
EvalReport evaluate_records(const std::vector<EvaluationRecord>& records,
                            const EvalOptions& opt);

/// File-level wrapper: joins gt and prediction JSONL by id (gt carries pose,
/// mpja/mbba or bbox; predictions carry pose + projection label). Skipped
/// records above max_skip_fraction raise std::runtime_error.
EvalReport evaluate_run(const std::string& gt_path,
                        const std::string& pred_path,
                        const std::string& camera_path, const EvalOptions& opt);

void write_curves_csv(const std::string& path,
                      const std::vector<BinSummary>& curve);
void write_report_json(const std::string& path, const EvalReport& report);

}  // namespace fishrepro
