#pragma once

#include <filesystem>
#include <vector>

#include "socon/config.hpp"
#include "socon/eval.hpp"

namespace socon {

struct RunSummary {
  std::filesystem::path out_dir;
  int frame_count = 0;
  int match_records = 0;
  int accepted_matches = 0;
  int accepted_loops = 0;
  double initial_graph_cost = 0.0;
  double optimized_graph_cost = 0.0;
};

struct EvalSummary {
  std::filesystem::path eval_dir;
  double odom_rmse_m = 0.0;
  double optimized_rmse_m = 0.0;
  double max_blind_gap_m = 0.0;
  double precision_at_accept = 1.0;  // over accepted matches
  double recall_at_accept = 0.0;     // TP queries / revisit opportunities
  int accepted_true_positives = 0;
  int accepted_false_positives = 0;
};

/// `simulate`: generate the scenario dataset into cfg.dataset_dir.
sim::DatasetSummary run_simulate(const RunConfig& cfg);

/**
 * `run`: describe every frame, retrieve + match loop candidates, build ICP
 * loop factors, optimize the pose graph. Writes match_log.csv,
 * factor_log.csv, keys.jsonl, graph.csv, graph_optimized.csv and
 * effective_config.json into cfg.out_dir (plus context/cloud dumps when
 * enabled). Deterministic for a given config and dataset.
 */
RunSummary run_pipeline(const RunConfig& cfg);

/**
 * `eval`: compute the metric suite from a completed run. Writes
 * pr_curve.csv, overlap_hist.csv, blind_traversal.csv, traj_error.csv and
 * eval_meta.json into cfg.out_dir/eval.
 */
EvalSummary run_evaluation(const RunConfig& cfg);

/// Rows of a match_log.csv (query_id,cand_id,distance,n_shift,m_shift,accepted).
struct MatchLogRow {
  std::int64_t query_id = 0;
  std::int64_t cand_id = 0;
  double distance = 1.0;
  int n_shift = 0;
  int m_shift = 0;
  bool accepted = false;
};

std::vector<MatchLogRow> load_match_log(const std::filesystem::path& path);

}  // namespace socon
