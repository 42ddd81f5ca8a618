#include "socon/polar_image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace socon {

PolarImage::PolarImage(SensorModel s, Eigen::MatrixXd px)
    : sensor(std::move(s)), pixels(std::move(px)) {
  sensor.validate();
  if (pixels.rows() != sensor.height_px || pixels.cols() != sensor.width_px)
    throw std::invalid_argument("PolarImage: pixel grid is " + std::to_string(pixels.rows()) +
                                "x" + std::to_string(pixels.cols()) + " but sensor expects " +
                                std::to_string(sensor.height_px) + "x" +
                                std::to_string(sensor.width_px));
  for (Eigen::Index i = 0; i < pixels.size(); ++i) {
    const double v = pixels.data()[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw std::invalid_argument("PolarImage: intensities must be finite and in [0, 1]");
  }
}

bool in_view(const SonarPoint& p, const SensorModel& sensor) {
  const double r = p.range();
  const double theta = p.azimuth();
  const double half_fov = sensor.fov_rad() / 2.0;
  return r >= sensor.min_range_m && r <= sensor.max_range_m && theta >= -half_fov &&
         theta <= half_fov;
}

std::pair<int, int> polar_of(const SonarPoint& p, const SensorModel& sensor) {
  if (!in_view(p, sensor))
    throw std::domain_error("polar_of: point (r=" + std::to_string(p.range()) +
                            ", theta=" + std::to_string(p.azimuth()) + ") is out of view");
  const double uf = sensor.alpha() * (p.azimuth() + sensor.fov_rad() / 2.0);
  const double vf = sensor.beta() * (p.range() - sensor.min_range_m);
  int u = static_cast<int>(std::floor(uf));
  int v = static_cast<int>(std::floor(vf));
  u = std::min(std::max(u, 0), sensor.width_px - 1);
  v = std::min(std::max(v, 0), sensor.height_px - 1);
  return {u, v};
}

SonarPoint cartesian_of(int u, int v, const SensorModel& sensor) {
  if (u < 0 || u >= sensor.width_px || v < 0 || v >= sensor.height_px)
    throw std::out_of_range("cartesian_of: bin (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") outside " + std::to_string(sensor.width_px) +
                            "x" + std::to_string(sensor.height_px));
  const double theta = (u + 0.5) / sensor.alpha() - sensor.fov_rad() / 2.0;
  const double r = (v + 0.5) / sensor.beta() + sensor.min_range_m;
  return SonarPoint{r * std::cos(theta), r * std::sin(theta), 0.0};
}

}  // namespace socon
