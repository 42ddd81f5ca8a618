#pragma once

#include "socon/descriptor.hpp"
#include "socon/rng.hpp"
#include "socon/simulator.hpp"

namespace socon_bench {

inline socon::SensorModel default_sensor() { return socon::SensorModel{}; }

inline socon::PolarImage random_image(std::uint64_t seed) {
  const auto sensor = default_sensor();
  socon::Rng rng(seed);
  Eigen::MatrixXd px(sensor.height_px, sensor.width_px);
  for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] = rng.uniform01();
  return socon::PolarImage(sensor, std::move(px));
}

/// A rendered frame from a small scatterer world, more sonar-like than noise.
inline socon::PolarImage rendered_image(std::uint64_t seed) {
  const auto sensor = default_sensor();
  socon::Rng rng(seed);
  const auto world =
      socon::sim::make_random_world(-60, -60, 60, 60, 800, 0.4, 1.0, rng.substream(1));
  socon::sim::RenderConfig cfg;
  cfg.r_ref_m = 10.0;
  return socon::sim::render_sonar(world, socon::SE2{}, sensor, cfg, rng.substream(2));
}

}  // namespace socon_bench
