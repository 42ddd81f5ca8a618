#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "socon/descriptor.hpp"
#include "socon/geometry.hpp"
#include "socon/polar_image.hpp"

namespace socon {

/// Raised by otsu_threshold when the histogram has a single occupied bin.
struct DegenerateHistogramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CloudPoint {
  double x_m = 0.0;
  double y_m = 0.0;
  double intensity = 0.0;
};

struct PointCloud2D {
  std::vector<CloudPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct PointsConfig {
  int median_kernel = 5;
  double band_lo = 0.25;  // kept range-bin band as fractions of H
  double band_hi = 0.75;
  int max_points = 2048;

  void validate() const {
    if (median_kernel < 1 || median_kernel % 2 == 0)
      throw std::invalid_argument("points.median_kernel must be odd and >= 1");
    if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0))
      throw std::invalid_argument("points.band requires 0 <= band_lo < band_hi <= 1");
    if (max_points < 1) throw std::invalid_argument("points.max_points must be >= 1");
  }
};

struct FrameConfig {
  int patch_w = 4;
  int patch_h = 4;
  PointsConfig points;

  void validate() const {
    if (patch_w < 1 || patch_h < 1)
      throw std::invalid_argument("descriptor.patch sizes must be >= 1");
    points.validate();
  }
};

/// Descriptor + point cloud + bookkeeping for one sonar image.
struct SonarFrame {
  std::int64_t frame_id = 0;
  double timestamp_s = 0.0;
  PolarKey polar_key;
  SonarContext context;
  PointCloud2D cloud;
  SE2 odom_pose;
};

/**
 * k x k median filter with edge replication at the borders.
 * Kernel must be odd, >= 1, and <= min(W, H).
 */
PolarImage median_filter(const PolarImage& img, int kernel);

/**
 * Threshold in [0, 1] maximizing between-class variance on a 256-bin
 * histogram; ties take the lowest bin. Foreground is intensity >= threshold.
 * Throws DegenerateHistogramError for a constant image.
 */
double otsu_threshold(const PolarImage& img);

/**
 * Foreground bins (Otsu) inside the range band [band_lo*H, band_hi*H),
 * converted to bin-center sensor-frame points. When more than max_points
 * survive, the highest-intensity ones are kept (ties: lower v, then lower u).
 */
PointCloud2D extract_points(const PolarImage& img, double band_lo, double band_hi,
                            int max_points);

/**
 * Full per-image pipeline: descriptor on the raw image; median filter then
 * point extraction for the cloud. A degenerate (constant) image yields an
 * empty cloud rather than an error.
 */
SonarFrame make_frame(const PolarImage& img, const FrameConfig& cfg, std::int64_t frame_id,
                      double timestamp_s, const SE2& odom_pose);

/// Debug dump: header x_m,y_m,intensity.
void dump_cloud_csv(const PointCloud2D& cloud, const std::filesystem::path& path);

}  // namespace socon
