#include "socon/registration.hpp"

#include <cmath>

#include "socon/kdtree.hpp"

namespace socon {
namespace {

struct Correspondences {
  std::vector<int> src_idx;
  std::vector<int> dst_idx;
  double rms = 0.0;
};

Correspondences match_points(const std::vector<CloudPoint>& src, const KdTree& dst_tree,
                             const SE2& transform, double max_dist) {
  Correspondences corr;
  const double max_sq = max_dist * max_dist;
  double sum_sq = 0.0;
  for (size_t s = 0; s < src.size(); ++s) {
    double px, py;
    transform.apply(src[s].x_m, src[s].y_m, px, py);
    const double q[2] = {px, py};
    const auto nn = dst_tree.nearest(q, 1);
    if (nn.empty() || nn[0].dist_sq > max_sq) continue;
    corr.src_idx.push_back(static_cast<int>(s));
    corr.dst_idx.push_back(static_cast<int>(nn[0].id));
    sum_sq += nn[0].dist_sq;
  }
  if (!corr.src_idx.empty())
    corr.rms = std::sqrt(sum_sq / static_cast<double>(corr.src_idx.size()));
  return corr;
}

// Closed-form least-squares SE2 for fixed correspondences (src -> dst).
SE2 best_fit_se2(const std::vector<CloudPoint>& src, const std::vector<CloudPoint>& dst,
                 const Correspondences& corr, const SE2& current) {
  const size_t n = corr.src_idx.size();
  double sx = 0, sy = 0, dx = 0, dy = 0;
  std::vector<double> srcx(n), srcy(n);
  for (size_t k = 0; k < n; ++k) {
    current.apply(src[corr.src_idx[k]].x_m, src[corr.src_idx[k]].y_m, srcx[k], srcy[k]);
    sx += srcx[k];
    sy += srcy[k];
    dx += dst[corr.dst_idx[k]].x_m;
    dy += dst[corr.dst_idx[k]].y_m;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  sx *= inv_n;
  sy *= inv_n;
  dx *= inv_n;
  dy *= inv_n;

  double sxx = 0, sxy = 0, syx = 0, syy = 0;
  for (size_t k = 0; k < n; ++k) {
    const double ax = srcx[k] - sx, ay = srcy[k] - sy;
    const double bx = dst[corr.dst_idx[k]].x_m - dx, by = dst[corr.dst_idx[k]].y_m - dy;
    sxx += ax * bx;
    sxy += ax * by;
    syx += ay * bx;
    syy += ay * by;
  }
  const double theta = std::atan2(sxy - syx, sxx + syy);
  const double c = std::cos(theta), s = std::sin(theta);
  const SE2 step(dx - (c * sx - s * sy), dy - (s * sx + c * sy), theta);
  return step.compose(current);
}

double param_change(const SE2& a, const SE2& b) {
  const SE2 d = a.between(b);
  return std::sqrt(d.x * d.x + d.y * d.y + d.yaw * d.yaw);
}

}  // namespace

IcpResult icp_2d(const PointCloud2D& src, const PointCloud2D& dst, const SE2& init,
                 const IcpConfig& cfg) {
  cfg.validate();
  IcpResult result;
  result.transform = init;
  if (src.size() < 3 || dst.size() < 3) return result;

  std::vector<double> dst_pts;
  std::vector<std::int64_t> dst_ids;
  dst_pts.reserve(dst.size() * 2);
  for (size_t i = 0; i < dst.points.size(); ++i) {
    dst_pts.push_back(dst.points[i].x_m);
    dst_pts.push_back(dst.points[i].y_m);
    dst_ids.push_back(static_cast<std::int64_t>(i));
  }
  const KdTree dst_tree(2, std::move(dst_pts), std::move(dst_ids));

  SE2 current = init;
  double prev_rms = std::numeric_limits<double>::infinity();
  Correspondences corr;
  for (int it = 0; it < cfg.max_iter; ++it) {
    corr = match_points(src.points, dst_tree, current, cfg.max_corr_dist_m);
    if (corr.src_idx.size() < 3) {
      result.converged = false;
      result.inlier_count = static_cast<int>(corr.src_idx.size());
      return result;
    }
    if (corr.rms > prev_rms + 1e-12) {
      // Re-matching after the last step raised the error; keep the previous
      // state and stop at this local minimum.
      result.converged = true;
      return result;
    }
    result.transform = current;
    result.rms_m = corr.rms;
    result.inlier_count = static_cast<int>(corr.src_idx.size());
    result.rms_history.push_back(corr.rms);
    result.iterations = it + 1;
    prev_rms = corr.rms;

    const SE2 next = best_fit_se2(src.points, dst.points, corr, current);
    if (param_change(current, next) < cfg.tol_m) {
      result.converged = true;
      return result;
    }
    current = next;
  }
  result.converged = false;  // iteration budget exhausted
  return result;
}

LoopFactorResult make_loop_factor(const SonarFrame& query, const SonarFrame& cand,
                                  const MatchResult& match, const IcpConfig& cfg) {
  LoopFactorResult out;
  if (query.cloud.size() < 3 || cand.cloud.size() < 3) {
    out.reject_reason = "too few points";
    return out;
  }
  out.icp = icp_2d(cand.cloud, query.cloud, match.init_pose, cfg);
  if (!out.icp.converged) {
    out.reject_reason = out.icp.inlier_count < 3 ? "too few points" : "not converged";
    return out;
  }
  if (out.icp.rms_m > cfg.rms_gate_m) {
    out.reject_reason = "rms gate";
    return out;
  }
  // Refinement pass with a tight correspondence gate: points detected in only
  // one of the two frames drop out instead of biasing the fit.
  if (cfg.refine_corr_dist_m > 0.0 && cfg.refine_corr_dist_m < cfg.max_corr_dist_m) {
    IcpConfig fine = cfg;
    fine.max_corr_dist_m = cfg.refine_corr_dist_m;
    const IcpResult refined = icp_2d(cand.cloud, query.cloud, out.icp.transform, fine);
    if (refined.converged && refined.inlier_count >= 3) out.icp = refined;
  }
  LoopFactor factor;
  factor.id_i = query.frame_id;
  factor.id_j = cand.frame_id;
  factor.measurement = out.icp.transform;
  // Least-squares covariance of the SE2 fit: translation variance
  // sigma_p^2 / N and rotation variance sigma_p^2 / (N * r_rms^2), where
  // r_rms is the cloud's RMS radius about its centroid (the lever arm).
  const double sigma_t = std::max(
      out.icp.rms_m / std::sqrt(static_cast<double>(out.icp.inlier_count)),
      cfg.sigma_floor_m);
  double cx = 0.0, cy = 0.0;
  for (const CloudPoint& p : query.cloud.points) {
    cx += p.x_m;
    cy += p.y_m;
  }
  cx /= static_cast<double>(query.cloud.size());
  cy /= static_cast<double>(query.cloud.size());
  double r_sq = 0.0;
  for (const CloudPoint& p : query.cloud.points)
    r_sq += (p.x_m - cx) * (p.x_m - cx) + (p.y_m - cy) * (p.y_m - cy);
  const double r_rms = std::max(std::sqrt(r_sq / query.cloud.size()), 1e-3);

  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  info(0, 0) = info(1, 1) = 1.0 / (sigma_t * sigma_t);
  info(2, 2) = (r_rms * r_rms) / (sigma_t * sigma_t);
  factor.information = info;
  out.factor = factor;
  return out;
}

}  // namespace socon
