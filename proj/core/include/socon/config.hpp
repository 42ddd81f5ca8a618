#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "socon/matching.hpp"
#include "socon/points.hpp"
#include "socon/pose_graph.hpp"
#include "socon/registration.hpp"
#include "socon/retrieval.hpp"
#include "socon/simulator.hpp"

namespace socon {

/// Noise model assumed when weighting odometry factors.
struct OdomInfoConfig {
  double sigma_trans_per_m = 0.02;
  double sigma_yaw_per_rad = 0.005;
  double sigma_trans_floor_m = 1e-3;
  double sigma_yaw_floor_rad = 1e-4;

  void validate() const {
    if (sigma_trans_per_m < 0.0 || sigma_yaw_per_rad < 0.0)
      throw std::invalid_argument("odom_info sigmas must be >= 0");
    if (!(sigma_trans_floor_m > 0.0 && sigma_yaw_floor_rad > 0.0))
      throw std::invalid_argument("odom_info floors must be > 0");
  }
};

struct EvalFileConfig {
  double tp_distance_m = 3.0;
  double tau_start = 0.0;
  double tau_stop = 1.0;
  double tau_step = 0.02;

  void validate() const {
    if (!(tp_distance_m > 0.0)) throw std::invalid_argument("eval.tp_distance_m must be > 0");
    if (!(tau_step > 0.0) || tau_stop < tau_start)
      throw std::invalid_argument("eval.tau grid must have step > 0 and stop >= start");
  }
};

/// Synthetic-dataset description for the `simulate` command.
struct ScenarioConfig {
  SensorModel sensor;
  sim::RenderConfig render;
  sim::World world;                 // explicit scatterers, or generated when
  int random_scatterers = 0;        // random_scatterers > 0
  double reflectivity_lo = 0.4;
  double reflectivity_hi = 1.0;
  sim::TrajectorySpec trajectory;   // seed filled from the run seed
};

/**
 * Every tunable of the pipeline, loaded from one JSON file (version 1).
 * Unknown keys are rejected; all module invariants are re-validated on load.
 */
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path dataset_dir;
  std::filesystem::path out_dir;

  FrameConfig frame;
  RetrievalConfig retrieval;
  MatchConfig matching;
  IcpConfig icp;
  OdomInfoConfig odom_info;
  PoseGraphConfig pose_graph;
  EvalFileConfig eval;

  bool dump_context = false;
  bool dump_clouds = false;

  std::optional<ScenarioConfig> scenario;

  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Parse from a JSON string (used by tests and by load_run_config).
RunConfig parse_run_config(const std::string& json_text);

/// Echo the effective configuration (scenario included when present).
std::string run_config_to_json(const RunConfig& cfg);

}  // namespace socon
