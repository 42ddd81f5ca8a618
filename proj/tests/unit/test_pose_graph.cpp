#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "socon/pose_graph.hpp"
#include "test_support.hpp"

using namespace socon;

namespace {

Eigen::Matrix3d iso_info(double trans_sigma, double yaw_sigma) {
  Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
  info(0, 0) = info(1, 1) = 1.0 / (trans_sigma * trans_sigma);
  info(2, 2) = 1.0 / (yaw_sigma * yaw_sigma);
  return info;
}

LoopFactor loop(std::int64_t i, std::int64_t j, const SE2& z, const Eigen::Matrix3d& info) {
  LoopFactor f;
  f.id_i = i;
  f.id_j = j;
  f.measurement = z;
  f.information = info;
  return f;
}

// Numeric residual of one factor for finite differencing.
Eigen::Vector3d factor_residual(const SE2& xi, const SE2& xj, const SE2& z) {
  const SE2 e = z.inverse().compose(xi.between(xj));
  return {e.x, e.y, e.yaw};
}

}  // namespace

TEST_CASE("a chain of 3 odometry factors creates 4 nodes") {
  PoseGraph g;
  const auto info = iso_info(0.1, 0.01);
  g.add_odom_factor(0, 1, SE2(1, 0, 0), info);
  g.add_odom_factor(1, 2, SE2(1, 0, 0.1), info);
  g.add_odom_factor(2, 3, SE2(1, 0, -0.1), info);
  CHECK(g.node_count() == 4);
  CHECK(g.has_node(3));
}

TEST_CASE("factor validation: ids, consecutiveness, SPD information") {
  PoseGraph g;
  const auto info = iso_info(0.1, 0.01);
  g.add_node(0, SE2{});
  g.add_node(1, SE2(1, 0, 0));
  CHECK_THROWS_AS(g.add_odom_factor(0, 2, SE2{}, info), std::invalid_argument);
  CHECK_THROWS_AS(g.add_loop_factor(loop(0, 5, SE2{}, info)), std::invalid_argument);
  CHECK_THROWS_AS(g.add_loop_factor(loop(0, 0, SE2{}, info)), std::invalid_argument);

  Eigen::Matrix3d bad = Eigen::Matrix3d::Zero();
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(g.add_loop_factor(loop(0, 1, SE2{}, bad)), std::invalid_argument);
  Eigen::Matrix3d asym = iso_info(0.1, 0.1);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(g.add_loop_factor(loop(0, 1, SE2{}, asym)), std::invalid_argument);
}

TEST_CASE("consistent noiseless factors optimize to zero cost and the true poses") {
  // Ground truth: a square with a 90-degree turn per side.
  std::vector<SE2> truth;
  truth.emplace_back(0, 0, 0);
  const SE2 side(2, 0, kPi / 2);
  for (int k = 0; k < 4; ++k) truth.push_back(truth.back().compose(side));

  PoseGraph g;
  const auto info = iso_info(0.05, 0.01);
  // Initialize away from the truth; factors are exact.
  g.add_node(0, truth[0]);
  for (size_t k = 1; k < truth.size(); ++k)
    g.add_node(static_cast<std::int64_t>(k), SE2(truth[k].x + 0.3 * k, truth[k].y - 0.2,
                                                 truth[k].yaw + 0.05 * k));
  for (size_t k = 0; k + 1 < truth.size(); ++k)
    g.add_odom_factor(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1),
                      truth[k].between(truth[k + 1]), info);
  g.add_loop_factor(loop(4, 0, truth[4].between(truth[0]), info));

  const OptimizeResult r = g.optimize(PoseGraphConfig{});
  CHECK(r.final_cost < 1e-16);
  for (size_t k = 0; k < truth.size(); ++k) {
    const SE2& p = r.poses.at(static_cast<std::int64_t>(k));
    CHECK(p.x == doctest::Approx(truth[k].x).epsilon(1e-6));
    CHECK(p.y == doctest::Approx(truth[k].y).epsilon(1e-6));
    CHECK(wrap_angle(p.yaw - truth[k].yaw) == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("square loop with yaw drift: closing the loop beats odometry alone") {
  // Odometry systematically under-rotates; one exact loop factor fixes it.
  std::vector<SE2> truth;
  truth.emplace_back(0, 0, 0);
  const SE2 side(2, 0, kPi / 2);
  for (int k = 0; k < 8; ++k) truth.push_back(truth.back().compose(side));

  const SE2 drifty(2, 0, kPi / 2 - 0.06);
  const auto info = iso_info(0.05, 0.05);

  PoseGraph odom_only;
  odom_only.add_node(0, truth[0]);
  for (size_t k = 0; k + 1 < truth.size(); ++k)
    odom_only.add_odom_factor(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1),
                              drifty, info);
  // Dead-reckoned end-pose error without loops.
  const SE2 dead_end = odom_only.nodes().at(8);
  const double odom_err = std::hypot(dead_end.x - truth[8].x, dead_end.y - truth[8].y);

  PoseGraph with_loop = odom_only;
  with_loop.add_loop_factor(loop(8, 0, truth[8].between(truth[0]), iso_info(0.01, 0.01)));
  const OptimizeResult r = with_loop.optimize(PoseGraphConfig{});
  const SE2 closed_end = r.poses.at(8);
  const double closed_err = std::hypot(closed_end.x - truth[8].x, closed_end.y - truth[8].y);

  CHECK(closed_err < odom_err);
  CHECK(r.final_cost < with_loop.cost() + 1e-12);  // optimize leaves the graph at the optimum
}

TEST_CASE("perturbing the optimum and re-optimizing returns to the same cost") {
  std::vector<SE2> truth;
  truth.emplace_back(0, 0, 0);
  for (int k = 0; k < 6; ++k)
    truth.push_back(truth.back().compose(SE2(1.5, 0.1 * k, 0.4)));

  PoseGraph g;
  Rng rng(3);
  const auto info = iso_info(0.1, 0.02);
  g.add_node(0, truth[0]);
  for (size_t k = 1; k < truth.size(); ++k) g.add_node(static_cast<std::int64_t>(k), truth[k]);
  for (size_t k = 0; k + 1 < truth.size(); ++k) {
    const SE2 z = truth[k].between(truth[k + 1]);
    g.add_odom_factor(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1),
                      SE2(z.x + 0.02 * rng.normal(), z.y + 0.02 * rng.normal(),
                          z.yaw + 0.01 * rng.normal()),
                      info);
  }
  g.add_loop_factor(loop(6, 0, truth[6].between(truth[0]), info));

  const OptimizeResult first = g.optimize(PoseGraphConfig{});

  PoseGraph perturbed;
  perturbed.add_node(0, first.poses.at(0));
  for (std::int64_t k = 1; k <= 6; ++k) {
    const SE2& p = first.poses.at(k);
    perturbed.add_node(k, SE2(p.x + 0.01 * rng.normal(), p.y + 0.01 * rng.normal(),
                              p.yaw + 0.005 * rng.normal()));
  }
  for (const auto& f : g.odom_factors())
    perturbed.add_odom_factor(f.id_i, f.id_j, f.measurement, f.information);
  for (const auto& f : g.loop_factors()) perturbed.add_loop_factor(f);

  const OptimizeResult second = perturbed.optimize(PoseGraphConfig{});
  CHECK(second.final_cost == doctest::Approx(first.final_cost).epsilon(1e-6));
}

TEST_CASE("residual jacobians match central finite differences") {
  Rng rng(7);
  const double eps = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const SE2 xi(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1.5, 1.5));
    const SE2 xj(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1.5, 1.5));
    const SE2 z(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1.0, 1.0));

    // Build a 2-node graph and extract its analytic step structure by probing
    // the public residual through cost(): instead, probe factor_residual.
    const auto numeric = [&](bool wrt_i) {
      Eigen::Matrix3d jac;
      for (int d = 0; d < 3; ++d) {
        double plus[3] = {0, 0, 0}, minus[3] = {0, 0, 0};
        plus[d] = eps;
        minus[d] = -eps;
        const auto nudge = [&](const SE2& p, const double* delta) {
          return SE2(p.x + delta[0], p.y + delta[1], p.yaw + delta[2]);
        };
        const Eigen::Vector3d rp = wrt_i ? factor_residual(nudge(xi, plus), xj, z)
                                         : factor_residual(xi, nudge(xj, plus), z);
        const Eigen::Vector3d rm = wrt_i ? factor_residual(nudge(xi, minus), xj, z)
                                         : factor_residual(xi, nudge(xj, minus), z);
        Eigen::Vector3d col = (rp - rm) / (2 * eps);
        col[2] = wrap_angle(rp[2] - rm[2]) / (2 * eps);
        jac.col(d) = col;
      }
      return jac;
    };

    // Analytic Jacobians, re-derived here independently of the solver:
    const double ci = std::cos(xi.yaw), si = std::sin(xi.yaw);
    const double cz = std::cos(z.yaw), sz = std::sin(z.yaw);
    Eigen::Matrix2d ri_t, rz_t, jrot;
    ri_t << ci, si, -si, ci;
    rz_t << cz, sz, -sz, cz;
    jrot << 0, -1, 1, 0;
    const Eigen::Vector2d dt(xj.x - xi.x, xj.y - xi.y);
    Eigen::Matrix3d ji = Eigen::Matrix3d::Zero(), jj = Eigen::Matrix3d::Zero();
    ji.topLeftCorner<2, 2>() = -(rz_t * ri_t);
    ji.topRightCorner<2, 1>() = -(rz_t * jrot * ri_t * dt);
    ji(2, 2) = -1;
    jj.topLeftCorner<2, 2>() = rz_t * ri_t;
    jj(2, 2) = 1;

    const Eigen::Matrix3d ni = numeric(true);
    const Eigen::Matrix3d nj = numeric(false);
    CHECK((ni - ji).cwiseAbs().maxCoeff() <
          1e-5 * std::max(1.0, ji.cwiseAbs().maxCoeff()));
    CHECK((nj - jj).cwiseAbs().maxCoeff() <
          1e-5 * std::max(1.0, jj.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("optimize cost history is monotone non-increasing") {
  Rng rng(13);
  PoseGraph g;
  const auto info = iso_info(0.1, 0.05);
  g.add_node(0, SE2{});
  SE2 pose;
  for (int k = 0; k < 20; ++k) {
    const SE2 z(1.0, rng.uniform(-0.2, 0.2), rng.uniform(-0.4, 0.4));
    pose = pose.compose(z);
    g.add_odom_factor(k, k + 1, SE2(z.x + 0.05 * rng.normal(), z.y + 0.05 * rng.normal(),
                                    z.yaw + 0.02 * rng.normal()),
                      info);
  }
  g.add_loop_factor(loop(20, 0, g.nodes().at(20).between(g.nodes().at(0)), info));
  g.add_loop_factor(loop(15, 2, g.nodes().at(15).between(g.nodes().at(2)), info));

  const OptimizeResult r = g.optimize(PoseGraphConfig{});
  for (size_t k = 1; k < r.cost_history.size(); ++k)
    CHECK(r.cost_history[k] <= r.cost_history[k - 1] + 1e-12);
}

TEST_CASE("gauge invariance: left-composed inputs give the same relative poses") {
  const SE2 gauge_shift(10.0, -4.0, 0.8);
  const auto build = [&](const SE2& premul) {
    PoseGraph g;
    Rng rng(17);
    const auto info = iso_info(0.1, 0.05);
    std::vector<SE2> init;
    init.push_back(premul);
    for (int k = 0; k < 8; ++k)
      init.push_back(init.back().compose(SE2(1.0, 0.05, 0.3 + 0.01 * k)));
    for (size_t k = 0; k < init.size(); ++k) g.add_node(static_cast<std::int64_t>(k), init[k]);
    for (size_t k = 0; k + 1 < init.size(); ++k) {
      const SE2 z = init[k].between(init[k + 1]);
      g.add_odom_factor(static_cast<std::int64_t>(k), static_cast<std::int64_t>(k + 1),
                        SE2(z.x + 0.03 * rng.normal(), z.y + 0.03 * rng.normal(),
                            z.yaw + 0.01 * rng.normal()),
                        info);
    }
    g.add_loop_factor(loop(8, 0, init[8].between(init[0]), info));
    return g.optimize(PoseGraphConfig{});
  };

  const OptimizeResult a = build(SE2{});
  const OptimizeResult b = build(gauge_shift);
  for (std::int64_t k = 1; k <= 8; ++k) {
    const SE2 rel_a = a.poses.at(0).between(a.poses.at(k));
    const SE2 rel_b = b.poses.at(0).between(b.poses.at(k));
    CHECK(rel_a.x == doctest::Approx(rel_b.x).epsilon(1e-6));
    CHECK(rel_a.y == doctest::Approx(rel_b.y).epsilon(1e-6));
    CHECK(wrap_angle(rel_a.yaw - rel_b.yaw) == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("disconnected graphs raise a diagnostic error") {
  PoseGraph g;
  g.add_node(0, SE2{});
  g.add_node(1, SE2(1, 0, 0));
  g.add_node(10, SE2(5, 5, 0));
  const auto info = iso_info(0.1, 0.1);
  g.add_odom_factor(0, 1, SE2(1, 0, 0), info);
  try {
    g.optimize(PoseGraphConfig{});
    FAIL("expected a connectivity error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("not connected") != std::string::npos);
    CHECK(msg.find("10") != std::string::npos);
  }
}

TEST_CASE("graph.csv round-trips nodes and factors") {
  PoseGraph g;
  const auto info = iso_info(0.1, 0.02);
  g.add_odom_factor(0, 1, SE2(1.0, 0.25, 0.125), info);
  g.add_odom_factor(1, 2, SE2(1.5, -0.5, -0.25), info);
  Eigen::Matrix3d full = info;
  full(0, 1) = full(1, 0) = 3.0;
  full(0, 2) = full(2, 0) = -1.0;
  full(1, 2) = full(2, 1) = 0.5;
  g.add_loop_factor(loop(2, 0, SE2(0.0625, 0.03125, 0.5), full));

  socon_test::TempDir tmp("graph_csv");
  save_graph_csv(g, tmp.path() / "graph.csv");
  const PoseGraph back = load_graph_csv(tmp.path() / "graph.csv");

  REQUIRE(back.node_count() == g.node_count());
  for (const auto& [id, pose] : g.nodes()) {
    CHECK(back.nodes().at(id).x == pose.x);
    CHECK(back.nodes().at(id).y == pose.y);
    CHECK(back.nodes().at(id).yaw == pose.yaw);
  }
  REQUIRE(back.odom_factors().size() == 2);
  REQUIRE(back.loop_factors().size() == 1);
  CHECK(back.loop_factors()[0].measurement.x == 0.0625);
  CHECK((back.loop_factors()[0].information - full).cwiseAbs().maxCoeff() == 0.0);

  // Save again: identical bytes.
  save_graph_csv(back, tmp.path() / "graph2.csv");
  CHECK(socon_test::read_file(tmp.path() / "graph.csv") ==
        socon_test::read_file(tmp.path() / "graph2.csv"));
}

TEST_CASE("huber-weighted optimization still reduces cost") {
  PoseGraph g;
  const auto info = iso_info(0.1, 0.05);
  g.add_node(0, SE2{});
  for (int k = 0; k < 10; ++k) g.add_odom_factor(k, k + 1, SE2(1, 0, 0.2), info);
  // One grossly wrong loop factor plus one correct loop.
  g.add_loop_factor(loop(10, 0, SE2(3.0, 3.0, 1.0), iso_info(0.5, 0.5)));
  g.add_loop_factor(loop(9, 1, g.nodes().at(9).between(g.nodes().at(1)), info));
  PoseGraphConfig cfg;
  cfg.huber_delta = 1.0;
  const double before = g.cost();
  const OptimizeResult r = g.optimize(cfg);
  CHECK(r.final_cost <= before);
}
