#include "socon/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace socon {
namespace {

void require_spd(const Eigen::Matrix3d& info, const char* who) {
  if ((info - info.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument(std::string(who) + ": information matrix not symmetric");
  Eigen::LLT<Eigen::Matrix3d> llt(info);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(std::string(who) + ": information matrix not positive definite");
}

Eigen::Vector3d residual(const SE2& xi, const SE2& xj, const SE2& z) {
  const SE2 e = z.inverse().compose(xi.between(xj));
  return {e.x, e.y, e.yaw};
}

// Jacobians of the residual w.r.t. additive perturbations of (x, y, yaw) of
// each endpoint. Rz/Ri are the measurement/node rotations, J = [[0,-1],[1,0]].
void residual_jacobians(const SE2& xi, const SE2& xj, const SE2& z, Eigen::Matrix3d& ji,
                        Eigen::Matrix3d& jj) {
  const double ci = std::cos(xi.yaw), si = std::sin(xi.yaw);
  const double cz = std::cos(z.yaw), sz = std::sin(z.yaw);
  Eigen::Matrix2d ri_t, rz_t, jrot;
  ri_t << ci, si, -si, ci;
  rz_t << cz, sz, -sz, cz;
  jrot << 0.0, -1.0, 1.0, 0.0;
  const Eigen::Vector2d dt(xj.x - xi.x, xj.y - xi.y);

  ji.setZero();
  ji.topLeftCorner<2, 2>() = -(rz_t * ri_t);
  ji.topRightCorner<2, 1>() = -(rz_t * jrot * ri_t * dt);
  ji(2, 2) = -1.0;

  jj.setZero();
  jj.topLeftCorner<2, 2>() = rz_t * ri_t;
  jj(2, 2) = 1.0;
}

}  // namespace

void PoseGraph::add_node(std::int64_t id, const SE2& pose) {
  if (!nodes_.emplace(id, pose).second)
    throw std::invalid_argument("PoseGraph: node " + std::to_string(id) + " already exists");
}

void PoseGraph::add_odom_factor(std::int64_t id_i, std::int64_t id_j, const SE2& z,
                                const Eigen::Matrix3d& information) {
  if (id_j != id_i + 1)
    throw std::invalid_argument("PoseGraph: odometry factors must connect consecutive ids");
  require_spd(information, "add_odom_factor");
  if (!has_node(id_i)) {
    if (!nodes_.empty())
      throw std::invalid_argument("PoseGraph: unknown node " + std::to_string(id_i));
    nodes_.emplace(id_i, SE2::identity());
  }
  if (!has_node(id_j)) nodes_.emplace(id_j, nodes_.at(id_i).compose(z));
  odom_factors_.push_back({id_i, id_j, z, information});
}

void PoseGraph::add_loop_factor(const LoopFactor& factor) {
  if (factor.id_i == factor.id_j)
    throw std::invalid_argument("PoseGraph: loop factor must connect distinct nodes");
  if (!has_node(factor.id_i) || !has_node(factor.id_j))
    throw std::invalid_argument("PoseGraph: loop factor references unknown node " +
                                std::to_string(has_node(factor.id_i) ? factor.id_j
                                                                     : factor.id_i));
  require_spd(factor.information, "add_loop_factor");
  loop_factors_.push_back(factor);
}

double PoseGraph::cost() const {
  double c = 0.0;
  for (const auto& f : odom_factors_) {
    const Eigen::Vector3d r = residual(nodes_.at(f.id_i), nodes_.at(f.id_j), f.measurement);
    c += r.dot(f.information * r);
  }
  for (const auto& f : loop_factors_) {
    const Eigen::Vector3d r = residual(nodes_.at(f.id_i), nodes_.at(f.id_j), f.measurement);
    c += r.dot(f.information * r);
  }
  return c;
}

OptimizeResult PoseGraph::optimize(const PoseGraphConfig& cfg) {
  cfg.validate();
  if (nodes_.empty()) throw std::runtime_error("PoseGraph: empty graph");

  // Connectivity check (union-find) so a singular system gets a clear message.
  std::unordered_map<std::int64_t, std::int64_t> parent;
  for (const auto& [id, _] : nodes_) parent[id] = id;
  const auto find = [&](std::int64_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  const auto unite = [&](std::int64_t a, std::int64_t b) { parent[find(a)] = find(b); };
  for (const auto& f : odom_factors_) unite(f.id_i, f.id_j);
  for (const auto& f : loop_factors_) unite(f.id_i, f.id_j);
  const std::int64_t gauge_id = nodes_.begin()->first;
  for (const auto& [id, _] : nodes_)
    if (find(id) != find(gauge_id))
      throw std::runtime_error(
          "PoseGraph: node " + std::to_string(id) + " is not connected to gauge node " +
          std::to_string(gauge_id) + "; the normal system is singular");

  // Free-variable layout: every node except the gauge, in id order.
  std::unordered_map<std::int64_t, int> slot;
  int n_free = 0;
  for (const auto& [id, _] : nodes_)
    if (id != gauge_id) slot[id] = n_free++;

  OptimizeResult result;
  double current_cost = cost();
  result.cost_history.push_back(current_cost);

  if (n_free == 0) {
    result.poses = nodes_;
    result.final_cost = current_cost;
    return result;
  }

  const int dim = 3 * n_free;
  Eigen::MatrixXd h(dim, dim);
  Eigen::VectorXd b(dim);

  const auto accumulate = [&](std::int64_t id_i, std::int64_t id_j, const SE2& z,
                              const Eigen::Matrix3d& info, double weight) {
    const SE2& xi = nodes_.at(id_i);
    const SE2& xj = nodes_.at(id_j);
    const Eigen::Vector3d r = residual(xi, xj, z);
    Eigen::Matrix3d ji, jj;
    residual_jacobians(xi, xj, z, ji, jj);
    const Eigen::Matrix3d w_info = weight * info;
    const bool free_i = id_i != gauge_id;
    const bool free_j = id_j != gauge_id;
    const int si = free_i ? 3 * slot[id_i] : -1;
    const int sj = free_j ? 3 * slot[id_j] : -1;
    if (free_i) {
      h.block<3, 3>(si, si) += ji.transpose() * w_info * ji;
      b.segment<3>(si) += ji.transpose() * w_info * r;
    }
    if (free_j) {
      h.block<3, 3>(sj, sj) += jj.transpose() * w_info * jj;
      b.segment<3>(sj) += jj.transpose() * w_info * r;
    }
    if (free_i && free_j) {
      h.block<3, 3>(si, sj) += ji.transpose() * w_info * jj;
      h.block<3, 3>(sj, si) += jj.transpose() * w_info * ji;
    }
  };

  for (int it = 0; it < cfg.max_iter; ++it) {
    h.setZero();
    b.setZero();
    for (const auto& f : odom_factors_)
      accumulate(f.id_i, f.id_j, f.measurement, f.information, 1.0);
    for (const auto& f : loop_factors_) {
      double weight = 1.0;
      if (cfg.huber_delta > 0.0) {
        const Eigen::Vector3d r =
            residual(nodes_.at(f.id_i), nodes_.at(f.id_j), f.measurement);
        const double e = std::sqrt(r.dot(f.information * r));
        if (e > cfg.huber_delta) weight = cfg.huber_delta / e;
      }
      accumulate(f.id_i, f.id_j, f.measurement, f.information, weight);
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error(
          "PoseGraph: normal system factorization failed (check gauge/connectivity)");
    const Eigen::VectorXd delta = ldlt.solve(-b);

    // Step halving: accept the largest fraction of delta that lowers the cost.
    const std::map<std::int64_t, SE2> backup = nodes_;
    double scale = 1.0;
    double new_cost = current_cost;
    bool improved = false;
    for (int half = 0; half < 25; ++half) {
      for (const auto& [id, s] : slot) {
        const SE2& p = backup.at(id);
        nodes_[id] = SE2(p.x + scale * delta[3 * s], p.y + scale * delta[3 * s + 1],
                         p.yaw + scale * delta[3 * s + 2]);
      }
      new_cost = cost();
      if (new_cost < current_cost) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) {
      nodes_ = backup;  // numerical floor reached
      break;
    }
    result.iterations = it + 1;
    result.cost_history.push_back(new_cost);
    const double decrease = current_cost - new_cost;
    current_cost = new_cost;
    if (decrease < cfg.tol) break;
  }

  result.poses = nodes_;
  result.final_cost = current_cost;
  return result;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_info(std::ofstream& out, const Eigen::Matrix3d& info) {
  out << "," << fmt(info(0, 0)) << "," << fmt(info(0, 1)) << "," << fmt(info(0, 2)) << ","
      << fmt(info(1, 1)) << "," << fmt(info(1, 2)) << "," << fmt(info(2, 2));
}

Eigen::Matrix3d read_info(const std::vector<std::string>& f, size_t at) {
  Eigen::Matrix3d info;
  const double i11 = std::stod(f[at]), i12 = std::stod(f[at + 1]), i13 = std::stod(f[at + 2]);
  const double i22 = std::stod(f[at + 3]), i23 = std::stod(f[at + 4]), i33 = std::stod(f[at + 5]);
  info << i11, i12, i13, i12, i22, i23, i13, i23, i33;
  return info;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void save_graph_csv(const PoseGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_graph_csv: cannot open " + path.string());
  for (const auto& [id, pose] : graph.nodes())
    out << "NODE," << id << "," << fmt(pose.x) << "," << fmt(pose.y) << "," << fmt(pose.yaw)
        << "\n";
  for (const auto& f : graph.odom_factors()) {
    out << "ODOM," << f.id_i << "," << f.id_j << "," << fmt(f.measurement.x) << ","
        << fmt(f.measurement.y) << "," << fmt(f.measurement.yaw);
    write_info(out, f.information);
    out << "\n";
  }
  for (const auto& f : graph.loop_factors()) {
    out << "LOOP," << f.id_i << "," << f.id_j << "," << fmt(f.measurement.x) << ","
        << fmt(f.measurement.y) << "," << fmt(f.measurement.yaw);
    write_info(out, f.information);
    out << "\n";
  }
}

PoseGraph load_graph_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_graph_csv: cannot open " + path.string());
  PoseGraph graph;
  std::string line;
  // Nodes precede factors in files we write; collect factors then replay.
  std::vector<OdomFactor> odoms;
  std::vector<LoopFactor> loops;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f[0] == "NODE" && f.size() == 5) {
      graph.add_node(std::stoll(f[1]), SE2(std::stod(f[2]), std::stod(f[3]), std::stod(f[4])));
    } else if (f[0] == "ODOM" && f.size() == 12) {
      odoms.push_back({std::stoll(f[1]), std::stoll(f[2]),
                       SE2(std::stod(f[3]), std::stod(f[4]), std::stod(f[5])),
                       read_info(f, 6)});
    } else if (f[0] == "LOOP" && f.size() == 12) {
      loops.push_back({std::stoll(f[1]), std::stoll(f[2]),
                       SE2(std::stod(f[3]), std::stod(f[4]), std::stod(f[5])),
                       read_info(f, 6)});
    } else {
      throw std::runtime_error("load_graph_csv: malformed row '" + line + "'");
    }
  }
  for (const auto& o : odoms) graph.add_odom_factor(o.id_i, o.id_j, o.measurement, o.information);
  for (const auto& l : loops) graph.add_loop_factor(l);
  return graph;
}

}  // namespace socon
