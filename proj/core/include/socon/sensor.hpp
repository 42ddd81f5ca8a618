#pragma once

#include <stdexcept>
#include <string>

#include "socon/geometry.hpp"

namespace socon {

/**
 * Imaging-sonar geometry: horizontal field of view, range window, and the
 * size of the polar image it produces. Azimuth 0 maps to the central column;
 * range bin 0 is the nearest range.
 */
struct SensorModel {
  double fov_deg = 130.0;
  double max_range_m = 50.0;
  double min_range_m = 0.0;
  int width_px = 260;   // azimuth bins (W)
  int height_px = 500;  // range bins (H)

  double fov_rad() const { return deg2rad(fov_deg); }
  double range_span_m() const { return max_range_m - min_range_m; }

  /// Azimuth bins per radian.
  double alpha() const { return static_cast<double>(width_px) / fov_rad(); }
  /// Range bins per meter.
  double beta() const { return static_cast<double>(height_px) / range_span_m(); }

  void validate() const {
    if (!(fov_deg > 0.0 && fov_deg <= 360.0))
      throw std::invalid_argument("SensorModel: fov_deg must be in (0, 360], got " +
                                  std::to_string(fov_deg));
    if (!(min_range_m >= 0.0 && min_range_m < max_range_m))
      throw std::invalid_argument("SensorModel: need 0 <= min_range_m < max_range_m");
    if (width_px < 1 || height_px < 1)
      throw std::invalid_argument("SensorModel: width_px and height_px must be >= 1");
    if (!std::isfinite(alpha()) || !std::isfinite(beta()) || alpha() <= 0.0 || beta() <= 0.0)
      throw std::invalid_argument("SensorModel: scale factors must be finite and positive");
  }

  bool operator==(const SensorModel&) const = default;
};

}  // namespace socon
