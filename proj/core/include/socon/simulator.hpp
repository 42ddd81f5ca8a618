#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "socon/dataset.hpp"
#include "socon/polar_image.hpp"
#include "socon/rng.hpp"

namespace socon {
namespace sim {

struct Scatterer {
  double x_m = 0.0;
  double y_m = 0.0;
  double reflectivity = 1.0;  // (0, 1]
};

struct World {
  double min_x = -50.0, min_y = -50.0, max_x = 50.0, max_y = 50.0;
  std::vector<Scatterer> scatterers;

  void validate() const;
};

World make_random_world(double min_x, double min_y, double max_x, double max_y, int count,
                        double refl_lo, double refl_hi, Rng rng);

struct RenderConfig {
  double r_ref_m = 1.0;        // range where a reflectivity-1 scatterer saturates
  double speckle_weight = 0.3; // multiplicative speckle mix, [0, 1]
  double noise_floor = 0.02;   // additive exponential background scale

  void validate() const;
};

struct Waypoint {
  double timestamp_s = 0.0;
  SE2 pose;
};

struct OdomNoise {
  double sigma_trans_per_m = 0.0;   // translation noise per meter traveled
  double sigma_yaw_per_rad = 0.0;   // yaw noise per radian turned
};

/// Scripted pose offset applied to every waypoint from from_index on:
/// yaw += yaw_offset, position += forward_offset along the original heading.
struct RevisitOffset {
  std::size_t from_index = 0;
  double yaw_offset_rad = 0.0;
  double forward_offset_m = 0.0;
};

struct TrajectorySpec {
  std::vector<Waypoint> waypoints;
  OdomNoise odom_noise;
  std::optional<RevisitOffset> revisit;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Two identical CCW laps on a circle; the second lap carries the revisit
/// offset. Headings are tangent to the circle.
TrajectorySpec make_two_lap_circle(double center_x, double center_y, double radius_m,
                                   int frames_per_lap, double dt_s, double yaw_offset_rad,
                                   double forward_offset_m, const OdomNoise& noise,
                                   std::uint64_t seed);

/**
 * Render one polar image: every in-view scatterer deposits
 * min(1, reflectivity * r_ref / r) with a 1-bin Gaussian spread at its
 * (azimuth, range) bin, then multiplicative speckle and an additive noise
 * floor are applied per pixel. Deterministic for a given rng.
 */
PolarImage render_sonar(const World& world, const SE2& pose, const SensorModel& sensor,
                        const RenderConfig& cfg, Rng rng);

struct DatasetSummary {
  std::filesystem::path dir;
  int frame_count = 0;
};

/**
 * Write a full dataset: PGM images, poses.csv (ground truth with revisit
 * offsets applied), odometry.csv (noise-integrated), sensor.json. Frame k
 * renders from substream(seed, k), so the result is reproducible and
 * order-independent.
 */
DatasetSummary generate_dataset(const World& world, const TrajectorySpec& traj,
                                const SensorModel& sensor, const RenderConfig& cfg,
                                const std::filesystem::path& out_dir);

/// The ground-truth poses generate_dataset would write (offsets applied).
std::vector<Waypoint> effective_waypoints(const TrajectorySpec& traj);

}  // namespace sim
}  // namespace socon
