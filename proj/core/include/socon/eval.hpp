#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "socon/geometry.hpp"

namespace socon {
namespace eval {

/// One query/candidate pair with its descriptor distance and ground truth.
struct DetectionRecord {
  std::int64_t query_id = 0;
  std::int64_t cand_id = 0;
  double distance = 1.0;
  double gt_separation_m = 0.0;
  double gt_rotation_deg = 0.0;
};

struct EvalConfig {
  double tp_distance_m = 3.0;
  std::vector<double> tau_grid;  // thresholds for the PR sweep
  int exclusion_gap = 50;        // mirrors the retrieval setting

  void validate() const;
};

/// Fill gt_separation/gt_rotation from ground-truth poses keyed by frame id.
void annotate_records(std::vector<DetectionRecord>& records,
                      const std::map<std::int64_t, SE2>& gt_poses);

struct PrPoint {
  double tau = 0.0;
  double precision = 1.0;  // 1.0 by convention at zero detections
  double recall = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int detections = 0;
};

/**
 * Precision-recall sweep. A record is a detection at tau iff its distance
 * <= tau; a detection is a true positive iff gt_separation <= tp_distance.
 * Recall counts queries with at least one true-positive detection, over the
 * queries that have some earlier frame outside the exclusion window within
 * tp_distance (the available revisit opportunities). Throws
 * std::runtime_error("degenerate dataset") when no opportunities exist.
 */
std::vector<PrPoint> pr_curve(const std::vector<DetectionRecord>& records,
                              const std::map<std::int64_t, SE2>& gt_poses,
                              const EvalConfig& cfg);

struct OverlapHistogram {
  double rotation_bin_deg = 10.0;
  double separation_bin_m = 1.0;
  std::vector<std::int64_t> rotation_counts;    // bin b: [b*10, (b+1)*10) degrees
  std::vector<std::int64_t> separation_counts;  // bin b: [b, b+1) meters
};

/// Histograms of |rotation| and separation over the given (TP) records.
OverlapHistogram overlap_histogram(const std::vector<DetectionRecord>& records);

struct BlindTraversal {
  std::vector<double> gaps_m;  // leading, between consecutive TPs, trailing
  double max_gap_m = 0.0;
  double total_length_m = 0.0;
};

/**
 * Ground-truth arc length traveled between consecutive true-positive queries,
 * including the segments before the first and after the last. With no TPs the
 * single gap is the whole trajectory length.
 */
BlindTraversal blind_traversal(const std::vector<std::int64_t>& tp_query_ids,
                               const std::vector<std::pair<std::int64_t, SE2>>& gt_trajectory);

struct TrajectoryError {
  std::vector<double> per_frame_m;
  double rmse_m = 0.0;
};

/// Per-frame translational error after expressing both trajectories relative
/// to their first pose.
TrajectoryError trajectory_error(const std::vector<SE2>& estimated,
                                 const std::vector<SE2>& ground_truth);

/// Uniform grid [start, stop] inclusive with the given step.
std::vector<double> tau_grid(double start, double stop, double step);

}  // namespace eval
}  // namespace socon
