#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "socon/geometry.hpp"
#include "socon/registration.hpp"

namespace socon {

struct OdomFactor {
  std::int64_t id_i = -1;
  std::int64_t id_j = -1;  // must be id_i + 1
  SE2 measurement;         // relative pose of j expressed in i's frame
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

struct PoseGraphConfig {
  int max_iter = 100;
  double tol = 1e-9;        // stop when the cost decrease falls below this
  double huber_delta = 0.0; // Huber kernel on loop residuals; <= 0 disables

  void validate() const {
    if (max_iter < 1) throw std::invalid_argument("pose_graph.max_iter must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("pose_graph.tol must be > 0");
  }
};

struct OptimizeResult {
  std::map<std::int64_t, SE2> poses;
  double final_cost = 0.0;
  int iterations = 0;
  std::vector<double> cost_history;  // non-increasing over accepted iterations
};

/**
 * SE(2) pose graph: nodes keyed by frame id, odometry factors between
 * consecutive ids, loop factors between arbitrary ids. The first (smallest
 * id) node is the gauge and stays fixed during optimization.
 *
 * Residual per factor: the (x, y, wrapped yaw) parameters of
 * z^-1 * (x_i^-1 * x_j); cost is the information-weighted squared sum.
 */
class PoseGraph {
 public:
  void add_node(std::int64_t id, const SE2& pose);

  /// j must equal i + 1. Missing endpoints are created: i at identity when the
  /// graph is empty, j by composing i's pose with the measurement.
  void add_odom_factor(std::int64_t id_i, std::int64_t id_j, const SE2& z,
                       const Eigen::Matrix3d& information);

  /// Both nodes must already exist.
  void add_loop_factor(const LoopFactor& factor);

  std::size_t node_count() const { return nodes_.size(); }
  const std::map<std::int64_t, SE2>& nodes() const { return nodes_; }
  const std::vector<OdomFactor>& odom_factors() const { return odom_factors_; }
  const std::vector<LoopFactor>& loop_factors() const { return loop_factors_; }
  bool has_node(std::int64_t id) const { return nodes_.count(id) != 0; }

  double cost() const;

  /**
   * Gauss-Newton with step halving on cost increase. Throws
   * std::runtime_error naming the issue when the graph is disconnected from
   * the gauge node (singular normal system).
   */
  OptimizeResult optimize(const PoseGraphConfig& cfg);

 private:
  std::map<std::int64_t, SE2> nodes_;
  std::vector<OdomFactor> odom_factors_;
  std::vector<LoopFactor> loop_factors_;
};

/// graph.csv rows: NODE,id,x,y,yaw / ODOM,i,j,dx,dy,dyaw,i11,i12,i13,i22,i23,i33 / LOOP,...
void save_graph_csv(const PoseGraph& graph, const std::filesystem::path& path);
PoseGraph load_graph_csv(const std::filesystem::path& path);

}  // namespace socon
