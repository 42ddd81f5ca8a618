#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "socon/geometry.hpp"
#include "socon/matching.hpp"
#include "socon/points.hpp"

namespace socon {

struct IcpConfig {
  int max_iter = 50;
  double tol_m = 1e-4;
  double max_corr_dist_m = 2.0;
  double refine_corr_dist_m = 0.5; // second-pass gate for loop factors; 0 disables
  double rms_gate_m = 1.0;         // loop-factor acceptance gate
  double sigma_floor_m = 0.05;     // lower bound on the information sigma

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("icp.max_iter must be >= 1");
    if (!(tol_m > 0.0)) throw std::invalid_argument("icp.tol_m must be > 0");
    if (!(max_corr_dist_m > 0.0))
      throw std::invalid_argument("icp.max_corr_dist_m must be > 0");
    if (refine_corr_dist_m < 0.0)
      throw std::invalid_argument("icp.refine_corr_dist_m must be >= 0");
    if (!(rms_gate_m > 0.0)) throw std::invalid_argument("icp.rms_gate_m must be > 0");
    if (!(sigma_floor_m > 0.0)) throw std::invalid_argument("icp.sigma_floor_m must be > 0");
  }
};

struct IcpResult {
  SE2 transform;  // maps src (candidate) points into the dst (query) frame
  double rms_m = 0.0;
  int iterations = 0;
  bool converged = false;
  int inlier_count = 0;
  std::vector<double> rms_history;  // per-iteration, non-increasing
};

/**
 * Point-to-point 2-D ICP: nearest-neighbor correspondences gated at
 * max_corr_dist_m, closed-form SE2 fit (centroid alignment + 2x2
 * cross-covariance rotation solve). Stops at max_iter, when the parameter
 * step drops below tol_m, or when re-matching would increase the rms (the
 * increasing step is rejected, keeping the recorded rms sequence monotone).
 * Fewer than 3 correspondences yields converged = false, not an error.
 */
IcpResult icp_2d(const PointCloud2D& src, const PointCloud2D& dst, const SE2& init,
                 const IcpConfig& cfg);

struct LoopFactor {
  std::int64_t id_i = -1;  // query frame
  std::int64_t id_j = -1;  // candidate frame
  SE2 measurement;         // relative pose of j expressed in i's frame
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

struct LoopFactorResult {
  std::optional<LoopFactor> factor;
  IcpResult icp;
  std::string reject_reason;  // empty when accepted

  bool accepted() const { return factor.has_value(); }
};

/**
 * Register candidate to query with ICP seeded by the matcher's initial pose.
 * Accepts iff ICP converged and rms <= rms_gate_m. The information matrix is
 * the least-squares covariance of the fit: translation sigma
 * max(rms/sqrt(inliers), sigma_floor), rotation sigma scaled down by the
 * cloud's RMS radius (its lever arm). Rejections carry a reason.
 */
LoopFactorResult make_loop_factor(const SonarFrame& query, const SonarFrame& cand,
                                  const MatchResult& match, const IcpConfig& cfg);

}  // namespace socon
