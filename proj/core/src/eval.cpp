#include "socon/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace socon {
namespace eval {

void EvalConfig::validate() const {
  if (!(tp_distance_m > 0.0)) throw std::invalid_argument("eval.tp_distance_m must be > 0");
  if (tau_grid.empty()) throw std::invalid_argument("eval.tau_grid must be non-empty");
  if (exclusion_gap < 0) throw std::invalid_argument("eval.exclusion_gap must be >= 0");
}

std::vector<double> tau_grid(double start, double stop, double step) {
  if (!(step > 0.0) || stop < start) throw std::invalid_argument("tau_grid: bad range");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    const double tau = start + k * step;
    if (tau > stop + 1e-12) break;
    grid.push_back(tau);
  }
  return grid;
}

namespace {

double separation(const SE2& a, const SE2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double rotation_deg(const SE2& a, const SE2& b) {
  return std::abs(rad2deg(wrap_angle(a.yaw - b.yaw)));
}

}  // namespace

void annotate_records(std::vector<DetectionRecord>& records,
                      const std::map<std::int64_t, SE2>& gt_poses) {
  for (DetectionRecord& r : records) {
    const auto qi = gt_poses.find(r.query_id);
    const auto ci = gt_poses.find(r.cand_id);
    if (qi == gt_poses.end() || ci == gt_poses.end())
      throw std::invalid_argument("annotate_records: record references unknown frame id");
    r.gt_separation_m = separation(qi->second, ci->second);
    r.gt_rotation_deg = rotation_deg(qi->second, ci->second);
  }
}

std::vector<PrPoint> pr_curve(const std::vector<DetectionRecord>& records,
                              const std::map<std::int64_t, SE2>& gt_poses,
                              const EvalConfig& cfg) {
  cfg.validate();

  // Revisit opportunities: queries with an earlier frame outside the
  // exclusion window within the TP radius.
  std::set<std::int64_t> opportunity_queries;
  for (auto qi = gt_poses.begin(); qi != gt_poses.end(); ++qi) {
    for (auto ci = gt_poses.begin(); ci != qi; ++ci) {
      const std::int64_t q = qi->first, c = ci->first;
      if (c > q - cfg.exclusion_gap && c <= q) continue;
      if (separation(qi->second, ci->second) <= cfg.tp_distance_m) {
        opportunity_queries.insert(q);
        break;
      }
    }
  }
  if (opportunity_queries.empty())
    throw std::runtime_error("degenerate dataset: no revisit opportunities");

  std::vector<PrPoint> curve;
  curve.reserve(cfg.tau_grid.size());
  for (const double tau : cfg.tau_grid) {
    PrPoint pt;
    pt.tau = tau;
    std::set<std::int64_t> tp_queries;
    for (const DetectionRecord& r : records) {
      if (r.distance > tau) continue;
      ++pt.detections;
      if (r.gt_separation_m <= cfg.tp_distance_m) {
        ++pt.true_positives;
        tp_queries.insert(r.query_id);
      } else {
        ++pt.false_positives;
      }
    }
    pt.precision = pt.detections == 0
                       ? 1.0
                       : static_cast<double>(pt.true_positives) / pt.detections;
    pt.recall = static_cast<double>(tp_queries.size()) /
                static_cast<double>(opportunity_queries.size());
    curve.push_back(pt);
  }
  return curve;
}

OverlapHistogram overlap_histogram(const std::vector<DetectionRecord>& records) {
  OverlapHistogram hist;
  for (const DetectionRecord& r : records) {
    const auto rb = static_cast<std::size_t>(r.gt_rotation_deg / hist.rotation_bin_deg);
    const auto sb = static_cast<std::size_t>(r.gt_separation_m / hist.separation_bin_m);
    if (rb >= hist.rotation_counts.size()) hist.rotation_counts.resize(rb + 1, 0);
    if (sb >= hist.separation_counts.size()) hist.separation_counts.resize(sb + 1, 0);
    ++hist.rotation_counts[rb];
    ++hist.separation_counts[sb];
  }
  return hist;
}

BlindTraversal blind_traversal(const std::vector<std::int64_t>& tp_query_ids,
                               const std::vector<std::pair<std::int64_t, SE2>>& gt_trajectory) {
  if (gt_trajectory.empty()) throw std::invalid_argument("blind_traversal: empty trajectory");

  // Cumulative arc length keyed by frame id.
  std::map<std::int64_t, double> arc;
  double total = 0.0;
  arc[gt_trajectory.front().first] = 0.0;
  for (size_t k = 1; k < gt_trajectory.size(); ++k) {
    total += separation(gt_trajectory[k].second, gt_trajectory[k - 1].second);
    arc[gt_trajectory[k].first] = total;
  }

  std::vector<double> s;
  s.reserve(tp_query_ids.size());
  for (const std::int64_t id : tp_query_ids) {
    const auto it = arc.find(id);
    if (it == arc.end())
      throw std::invalid_argument("blind_traversal: unknown query id " + std::to_string(id));
    s.push_back(it->second);
  }
  std::sort(s.begin(), s.end());

  BlindTraversal out;
  out.total_length_m = total;
  if (s.empty()) {
    out.gaps_m.push_back(total);
  } else {
    out.gaps_m.push_back(s.front());
    for (size_t k = 1; k < s.size(); ++k) out.gaps_m.push_back(s[k] - s[k - 1]);
    out.gaps_m.push_back(total - s.back());
  }
  out.max_gap_m = *std::max_element(out.gaps_m.begin(), out.gaps_m.end());
  return out;
}

TrajectoryError trajectory_error(const std::vector<SE2>& estimated,
                                 const std::vector<SE2>& ground_truth) {
  if (estimated.size() != ground_truth.size())
    throw std::invalid_argument("trajectory_error: length mismatch");
  if (estimated.empty()) throw std::invalid_argument("trajectory_error: empty trajectories");

  TrajectoryError out;
  out.per_frame_m.reserve(estimated.size());
  const SE2 est0_inv = estimated.front().inverse();
  const SE2 gt0_inv = ground_truth.front().inverse();
  double sum_sq = 0.0;
  for (size_t k = 0; k < estimated.size(); ++k) {
    const SE2 e = est0_inv.compose(estimated[k]);
    const SE2 g = gt0_inv.compose(ground_truth[k]);
    const double err = std::hypot(e.x - g.x, e.y - g.y);
    out.per_frame_m.push_back(err);
    sum_sq += err * err;
  }
  out.rmse_m = std::sqrt(sum_sq / static_cast<double>(estimated.size()));
  return out;
}

}  // namespace eval
}  // namespace socon
