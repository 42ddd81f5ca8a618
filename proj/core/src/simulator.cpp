#include "socon/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "socon/pgm_io.hpp"

namespace socon {
namespace sim {

void World::validate() const {
  if (!(min_x < max_x && min_y < max_y))
    throw std::invalid_argument("World: bounds must satisfy min < max");
  for (const Scatterer& s : scatterers) {
    if (!(s.reflectivity > 0.0 && s.reflectivity <= 1.0))
      throw std::invalid_argument("World: reflectivity must be in (0, 1]");
    if (s.x_m < min_x || s.x_m > max_x || s.y_m < min_y || s.y_m > max_y)
      throw std::invalid_argument("World: scatterer outside bounds");
  }
}

void RenderConfig::validate() const {
  if (!(r_ref_m > 0.0)) throw std::invalid_argument("render.r_ref_m must be > 0");
  if (!(speckle_weight >= 0.0 && speckle_weight <= 1.0))
    throw std::invalid_argument("render.speckle_weight must be in [0, 1]");
  if (!(noise_floor >= 0.0)) throw std::invalid_argument("render.noise_floor must be >= 0");
}

void TrajectorySpec::validate() const {
  if (waypoints.empty()) throw std::invalid_argument("TrajectorySpec: no waypoints");
  for (size_t k = 1; k < waypoints.size(); ++k)
    if (!(waypoints[k].timestamp_s > waypoints[k - 1].timestamp_s))
      throw std::invalid_argument("TrajectorySpec: timestamps must be strictly increasing");
  if (odom_noise.sigma_trans_per_m < 0.0 || odom_noise.sigma_yaw_per_rad < 0.0)
    throw std::invalid_argument("TrajectorySpec: noise sigmas must be >= 0");
  if (revisit && revisit->from_index >= waypoints.size())
    throw std::invalid_argument("TrajectorySpec: revisit.from_index out of range");
}

World make_random_world(double min_x, double min_y, double max_x, double max_y, int count,
                        double refl_lo, double refl_hi, Rng rng) {
  if (count < 0) throw std::invalid_argument("make_random_world: count must be >= 0");
  if (!(refl_lo > 0.0 && refl_lo <= refl_hi && refl_hi <= 1.0))
    throw std::invalid_argument("make_random_world: need 0 < refl_lo <= refl_hi <= 1");
  World w;
  w.min_x = min_x;
  w.min_y = min_y;
  w.max_x = max_x;
  w.max_y = max_y;
  w.scatterers.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    Scatterer s;
    s.x_m = rng.uniform(min_x, max_x);
    s.y_m = rng.uniform(min_y, max_y);
    s.reflectivity = rng.uniform(refl_lo, refl_hi);
    w.scatterers.push_back(s);
  }
  w.validate();
  return w;
}

TrajectorySpec make_two_lap_circle(double center_x, double center_y, double radius_m,
                                   int frames_per_lap, double dt_s, double yaw_offset_rad,
                                   double forward_offset_m, const OdomNoise& noise,
                                   std::uint64_t seed) {
  if (frames_per_lap < 1) throw std::invalid_argument("make_two_lap_circle: frames_per_lap >= 1");
  if (!(radius_m > 0.0 && dt_s > 0.0))
    throw std::invalid_argument("make_two_lap_circle: radius and dt must be > 0");
  TrajectorySpec spec;
  spec.seed = seed;
  spec.odom_noise = noise;
  const int total = 2 * frames_per_lap;
  spec.waypoints.reserve(static_cast<size_t>(total));
  for (int k = 0; k < total; ++k) {
    const double phi = 2.0 * kPi * static_cast<double>(k % frames_per_lap) / frames_per_lap;
    Waypoint wp;
    wp.timestamp_s = k * dt_s;
    wp.pose = SE2(center_x + radius_m * std::cos(phi), center_y + radius_m * std::sin(phi),
                  phi + kPi / 2.0);  // tangent heading, CCW travel
    spec.waypoints.push_back(wp);
  }
  if (yaw_offset_rad != 0.0 || forward_offset_m != 0.0)
    spec.revisit = RevisitOffset{static_cast<size_t>(frames_per_lap), yaw_offset_rad,
                                 forward_offset_m};
  return spec;
}

std::vector<Waypoint> effective_waypoints(const TrajectorySpec& traj) {
  traj.validate();
  std::vector<Waypoint> wps = traj.waypoints;
  if (traj.revisit) {
    for (size_t k = traj.revisit->from_index; k < wps.size(); ++k) {
      const SE2& p = wps[k].pose;
      double ox, oy;
      p.apply(traj.revisit->forward_offset_m, 0.0, ox, oy);
      wps[k].pose = SE2(ox, oy, p.yaw + traj.revisit->yaw_offset_rad);
    }
  }
  return wps;
}

PolarImage render_sonar(const World& world, const SE2& pose, const SensorModel& sensor,
                        const RenderConfig& cfg, Rng rng) {
  world.validate();
  sensor.validate();
  cfg.validate();

  const int W = sensor.width_px, H = sensor.height_px;
  Eigen::MatrixXd px = Eigen::MatrixXd::Zero(H, W);

  const SE2 world_to_sensor = pose.inverse();
  for (const Scatterer& s : world.scatterers) {
    double xs, ys;
    world_to_sensor.apply(s.x_m, s.y_m, xs, ys);
    const SonarPoint p{xs, ys, 0.0};
    if (!in_view(p, sensor)) continue;
    const double r = p.range();
    const double amp = std::min(1.0, s.reflectivity * cfg.r_ref_m / std::max(r, 1e-6));
    // Deposit at the scatterer's bin with a 1-bin Gaussian spread; the peak
    // sits exactly on the polar_of bin.
    const auto [cu, cv] = polar_of(p, sensor);
    for (int dv = -2; dv <= 2; ++dv) {
      const int v = cv + dv;
      if (v < 0 || v >= H) continue;
      for (int du = -2; du <= 2; ++du) {
        const int u = cu + du;
        if (u < 0 || u >= W) continue;
        px(v, u) += amp * std::exp(-0.5 * (du * du + dv * dv));
      }
    }
  }

  // Per-pixel noise in fixed row-major order: multiplicative speckle
  // (exponential, mean 1) then an additive exponential floor.
  const double w = cfg.speckle_weight;
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      const double e1 = rng.exponential();
      const double e2 = rng.exponential();
      double val = px(v, u) * ((1.0 - w) + w * e1) + cfg.noise_floor * e2;
      px(v, u) = std::min(1.0, std::max(0.0, val));
    }
  }
  return PolarImage(sensor, std::move(px));
}

DatasetSummary generate_dataset(const World& world, const TrajectorySpec& traj,
                                const SensorModel& sensor, const RenderConfig& cfg,
                                const std::filesystem::path& out_dir) {
  traj.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("generate_dataset: cannot create " + out_dir.string() + ": " +
                             ec.message());

  const std::vector<Waypoint> wps = effective_waypoints(traj);
  const Rng base(traj.seed);

  std::vector<PoseRecord> gt;
  gt.reserve(wps.size());
  for (size_t k = 0; k < wps.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", k);
    const PolarImage img = render_sonar(world, wps[k].pose, sensor, cfg,
                                        base.substream(static_cast<std::uint64_t>(k)));
    save_pgm(img, out_dir / name);
    gt.push_back({static_cast<std::int64_t>(k), wps[k].timestamp_s, wps[k].pose, name});
  }

  // Odometry: integrate ground-truth relative motions with per-step noise
  // scaled by the step's translation and rotation magnitudes.
  std::vector<PoseRecord> odom = gt;
  Rng noise_rng = base.substream(0xFFFFFFFF00000000ull);
  for (size_t k = 0; k + 1 < wps.size(); ++k) {
    const SE2 rel = wps[k].pose.between(wps[k + 1].pose);
    const double st = traj.odom_noise.sigma_trans_per_m * rel.translation_norm();
    const double sy = traj.odom_noise.sigma_yaw_per_rad * std::abs(rel.yaw);
    const SE2 noisy(rel.x + st * noise_rng.normal(), rel.y + st * noise_rng.normal(),
                    rel.yaw + sy * noise_rng.normal());
    odom[k + 1].pose = odom[k].pose.compose(noisy);
  }

  save_sensor_json(sensor, out_dir / "sensor.json");
  save_poses_csv(gt, out_dir / "poses.csv");
  save_poses_csv(odom, out_dir / "odometry.csv");
  return {out_dir, static_cast<int>(wps.size())};
}

}  // namespace sim
}  // namespace socon
