#pragma once

#include <Eigen/Core>
#include <filesystem>

#include "socon/polar_image.hpp"

namespace socon {

/**
 * Global descriptor of a polar image: the image max-pooled over
 * patch_w x patch_h patches. Stored as an R x A matrix where column i is the
 * range profile of azimuth sector i (A = floor(W/patch_w) columns,
 * R = floor(H/patch_h) rows). Trailing pixels of a non-divisible image are
 * dropped.
 */
struct SonarContext {
  SensorModel sensor;
  int patch_w = 4;
  int patch_h = 4;
  Eigen::MatrixXd values;  // R x A, entries in [0, 1]

  int cols() const { return static_cast<int>(values.cols()); }  // A
  int rows() const { return static_cast<int>(values.rows()); }  // R
};

/// Row means of a context; the R-vector used for candidate retrieval.
struct PolarKey {
  Eigen::VectorXd values;

  int dim() const { return static_cast<int>(values.size()); }
};

SonarContext make_context(const PolarImage& img, int patch_w, int patch_h);

PolarKey make_polar_key(const SonarContext& ctx);

/// Debug dump: R rows x A columns of comma-separated values.
void dump_context_csv(const SonarContext& ctx, const std::filesystem::path& path);

}  // namespace socon
