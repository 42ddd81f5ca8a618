#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "socon/pgm_io.hpp"
#include "socon/simulator.hpp"
#include "test_support.hpp"

using namespace socon;
using namespace socon::sim;

namespace {

RenderConfig quiet() {
  RenderConfig cfg;
  cfg.speckle_weight = 0.0;
  cfg.noise_floor = 0.0;
  cfg.r_ref_m = 10.0;
  return cfg;
}

}  // namespace

TEST_CASE("empty world with zero noise renders an all-zero image") {
  World w;
  const PolarImage img = render_sonar(w, SE2{}, socon_test::default_sensor(), quiet(), Rng(1));
  CHECK(img.pixels.maxCoeff() == 0.0);
}

TEST_CASE("a scatterer dead ahead lands at the center column, correct range row") {
  const SensorModel s = socon_test::default_sensor();
  World w;
  w.scatterers.push_back({10.0, 0.0, 1.0});
  const PolarImage img = render_sonar(w, SE2{}, s, quiet(), Rng(1));

  Eigen::Index max_v, max_u;
  img.pixels.maxCoeff(&max_v, &max_u);
  CHECK(max_u == s.width_px / 2);
  CHECK(max_v == 100);  // beta * 10 m = 10 px/m * 10
  CHECK(img.pixels(max_v, max_u) > 0.5);
}

TEST_CASE("rendering is deterministic for the same rng state") {
  const SensorModel s = socon_test::default_sensor();
  Rng base(99);
  const World w = make_random_world(-60, -60, 60, 60, 300, 0.4, 1.0, base.substream(0));
  RenderConfig cfg;
  cfg.r_ref_m = 10.0;
  const SE2 pose(3.0, -2.0, 0.4);
  const PolarImage a = render_sonar(w, pose, s, cfg, base.substream(7));
  const PolarImage b = render_sonar(w, pose, s, cfg, base.substream(7));
  CHECK((a.pixels - b.pixels).cwiseAbs().maxCoeff() == 0.0);
  const PolarImage c = render_sonar(w, pose, s, cfg, base.substream(8));
  CHECK((a.pixels - c.pixels).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rendered peak bin equals polar_of of the sensor-frame point") {
  const SensorModel s = socon_test::default_sensor();
  Rng rng(12345);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const SE2 pose(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-3.0, 3.0));
    World w;
    w.scatterers.push_back(
        {rng.uniform(-49.0, 49.0), rng.uniform(-49.0, 49.0), rng.uniform(0.5, 1.0)});

    double xs, ys;
    pose.inverse().apply(w.scatterers[0].x_m, w.scatterers[0].y_m, xs, ys);
    const SonarPoint p{xs, ys, 0.0};
    if (!in_view(p, s) || p.range() < 1.0) continue;
    // Skip points within a bin of the FOV/range edges (the splat is clipped).
    const double uf = s.alpha() * (p.azimuth() + s.fov_rad() / 2.0);
    const double vf = s.beta() * (p.range() - s.min_range_m);
    if (uf < 1.0 || uf > s.width_px - 1.0 || vf < 1.0 || vf > s.height_px - 1.0) continue;

    const PolarImage img = render_sonar(w, pose, s, quiet(), Rng(trial));
    Eigen::Index max_v, max_u;
    img.pixels.maxCoeff(&max_v, &max_u);
    auto [u, v] = polar_of(p, s);
    CHECK(max_u == u);
    CHECK(max_v == v);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("two-lap circle: revisit pairs differ by exactly the scripted offset") {
  const double yaw_off = deg2rad(20.0);
  const TrajectorySpec spec =
      make_two_lap_circle(0, 0, 20.0, 50, 0.5, yaw_off, 0.0, OdomNoise{}, 1);
  const auto wps = effective_waypoints(spec);
  REQUIRE(wps.size() == 100);
  for (int k = 0; k < 50; ++k) {
    const SE2 d = wps[k].pose.between(wps[k + 50].pose);
    CHECK(std::hypot(d.x, d.y) < 1e-12);
    CHECK(wrap_angle(d.yaw - yaw_off) == doctest::Approx(0.0).epsilon(1e-12));
  }

  const TrajectorySpec fwd = make_two_lap_circle(0, 0, 20.0, 50, 0.5, 0.0, 5.0, OdomNoise{}, 1);
  const auto wps2 = effective_waypoints(fwd);
  for (int k = 0; k < 50; ++k) {
    const SE2 d = wps2[k].pose.between(wps2[k + 50].pose);
    CHECK(d.x == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(std::abs(d.y) < 1e-9);
    CHECK(wrap_angle(d.yaw) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("generate_dataset writes the manifest with one row per frame") {
  socon_test::TempDir tmp("simgen");
  SensorModel s = socon_test::small_sensor(32, 32);
  Rng base(5);
  const World w = make_random_world(-15, -15, 15, 15, 60, 0.4, 1.0, base.substream(0));

  TrajectorySpec spec;
  spec.seed = 5;
  for (int k = 0; k < 10; ++k) {
    Waypoint wp;
    wp.timestamp_s = k * 1.0;
    wp.pose = SE2(0.5 * k, 0.0, 0.0);
    spec.waypoints.push_back(wp);
  }

  const DatasetSummary sum = generate_dataset(w, spec, s, quiet(), tmp.path() / "ds");
  CHECK(sum.frame_count == 10);
  const Dataset ds = load_dataset(tmp.path() / "ds");
  CHECK(ds.ground_truth.size() == 10);
  CHECK(ds.odometry.size() == 10);
  CHECK(ds.sensor == s);
  for (const auto& rec : ds.ground_truth)
    CHECK(std::filesystem::exists(ds.image_path(rec)));

  // Zero odometry noise: odometry.csv equals poses.csv.
  CHECK(socon_test::read_file(tmp.path() / "ds" / "poses.csv") ==
        socon_test::read_file(tmp.path() / "ds" / "odometry.csv"));
}

TEST_CASE("identical world, spec and seed give a byte-identical dataset") {
  socon_test::TempDir tmp("simdet");
  SensorModel s = socon_test::small_sensor(32, 32);
  Rng base(42);
  const World w = make_random_world(-15, -15, 15, 15, 40, 0.4, 1.0, base.substream(0));
  TrajectorySpec spec;
  spec.seed = 42;
  spec.odom_noise = {0.02, 0.005};
  for (int k = 0; k < 6; ++k) {
    Waypoint wp;
    wp.timestamp_s = k * 1.0;
    wp.pose = SE2(k * 1.0, 0.2 * k, 0.1 * k);
    spec.waypoints.push_back(wp);
  }
  RenderConfig cfg;
  cfg.r_ref_m = 8.0;

  generate_dataset(w, spec, s, cfg, tmp.path() / "a");
  generate_dataset(w, spec, s, cfg, tmp.path() / "b");
  for (const auto& entry : std::filesystem::directory_iterator(tmp.path() / "a")) {
    const auto name = entry.path().filename();
    CHECK(socon_test::read_file(entry.path()) ==
          socon_test::read_file(tmp.path() / "b" / name));
  }
}

TEST_CASE("odometry noise integrates drift but starts at the true pose") {
  socon_test::TempDir tmp("simnoise");
  SensorModel s = socon_test::small_sensor(16, 16);
  World w;
  w.min_x = -5;
  w.min_y = -5;
  w.max_x = 50;
  w.max_y = 5;
  TrajectorySpec spec;
  spec.seed = 9;
  spec.odom_noise = {0.1, 0.0};
  for (int k = 0; k < 30; ++k) {
    Waypoint wp;
    wp.timestamp_s = k;
    wp.pose = SE2(k * 1.0, 0, 0);
    spec.waypoints.push_back(wp);
  }
  generate_dataset(w, spec, s, quiet(), tmp.path() / "ds");
  const Dataset ds = load_dataset(tmp.path() / "ds");
  CHECK(ds.odometry[0].pose.x == ds.ground_truth[0].pose.x);
  double max_dev = 0.0;
  for (size_t k = 0; k < ds.odometry.size(); ++k)
    max_dev = std::max(max_dev, std::hypot(ds.odometry[k].pose.x - ds.ground_truth[k].pose.x,
                                           ds.odometry[k].pose.y - ds.ground_truth[k].pose.y));
  CHECK(max_dev > 0.0);
  CHECK(max_dev < 5.0);
}

TEST_CASE("trajectory and world validation") {
  TrajectorySpec bad;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.waypoints.push_back({1.0, SE2{}});
  bad.waypoints.push_back({1.0, SE2{}});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  World w;
  w.scatterers.push_back({100.0, 0.0, 0.5});
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  World w2;
  w2.scatterers.push_back({0.0, 0.0, 0.0});
  CHECK_THROWS_AS(w2.validate(), std::invalid_argument);
}
