#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>

#include "socon/sensor.hpp"

namespace socon {

/// A single sonar return in the sensor frame (elevation is lost, z = 0).
struct SonarPoint {
  double x_s = 0.0;
  double y_s = 0.0;
  double intensity = 0.0;

  double range() const { return std::hypot(x_s, y_s); }
  double azimuth() const { return std::atan2(y_s, x_s); }
};

/**
 * Intensity image in (azimuth, range) coordinates. pixels(v, u) with
 * v = range bin (0 = nearest) and u = azimuth bin (0 = leftmost beam);
 * values are in [0, 1].
 */
struct PolarImage {
  SensorModel sensor;
  Eigen::MatrixXd pixels;  // height_px x width_px

  PolarImage() = default;
  PolarImage(SensorModel s, Eigen::MatrixXd px);

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
};

/// True iff the point lies inside the sensor's FOV and range window.
bool in_view(const SonarPoint& p, const SensorModel& sensor);

/**
 * Bin indices of a sensor-frame point: u = floor(alpha*(theta + fov/2)),
 * v = floor(beta*(r - min_range)), clamped at the far edges.
 * Throws std::domain_error for points outside the FOV or range window.
 */
std::pair<int, int> polar_of(const SonarPoint& p, const SensorModel& sensor);

/**
 * Bin-center point for (u, v). Throws std::out_of_range for bad indices.
 * Round-trips with polar_of to the same bin.
 */
SonarPoint cartesian_of(int u, int v, const SensorModel& sensor);

}  // namespace socon
