#include "socon/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <unordered_map>

#include "socon/pgm_io.hpp"

namespace socon {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

sim::World scenario_world(const ScenarioConfig& sc, std::uint64_t seed) {
  if (sc.random_scatterers > 0) {
    sim::World w = sim::make_random_world(sc.world.min_x, sc.world.min_y, sc.world.max_x,
                                          sc.world.max_y, sc.random_scatterers,
                                          sc.reflectivity_lo, sc.reflectivity_hi,
                                          Rng(seed).substream(0x574F524Cull));
    w.scatterers.insert(w.scatterers.end(), sc.world.scatterers.begin(),
                        sc.world.scatterers.end());
    w.validate();
    return w;
  }
  return sc.world;
}

}  // namespace

sim::DatasetSummary run_simulate(const RunConfig& cfg) {
  if (!cfg.scenario)
    throw std::invalid_argument("simulate: config has no 'scenario' section");
  sim::TrajectorySpec traj = cfg.scenario->trajectory;
  traj.seed = cfg.seed;
  const sim::World world = scenario_world(*cfg.scenario, cfg.seed);
  return sim::generate_dataset(world, traj, cfg.scenario->sensor, cfg.scenario->render,
                               cfg.dataset_dir);
}

RunSummary run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  const Dataset ds = load_dataset(cfg.dataset_dir);

  std::filesystem::create_directories(cfg.out_dir);
  if (cfg.dump_context) std::filesystem::create_directories(cfg.out_dir / "context");
  if (cfg.dump_clouds) std::filesystem::create_directories(cfg.out_dir / "clouds");

  std::ofstream match_log(cfg.out_dir / "match_log.csv");
  match_log << "query_id,cand_id,distance,n_shift,m_shift,accepted\n";
  std::ofstream factor_log(cfg.out_dir / "factor_log.csv");
  factor_log << "id_i,id_j,dx,dy,dyaw,rms,accepted,reason\n";

  RunSummary summary;
  summary.out_dir = cfg.out_dir;
  summary.frame_count = static_cast<int>(ds.ground_truth.size());

  KeyIndex index;
  std::vector<SonarFrame> frames;
  frames.reserve(ds.ground_truth.size());
  std::unordered_map<std::int64_t, size_t> frame_slot;
  std::vector<LoopFactor> loops;

  for (size_t k = 0; k < ds.ground_truth.size(); ++k) {
    const PoseRecord& rec = ds.ground_truth[k];
    const PoseRecord& orec = ds.odometry[k];
    if (orec.frame_id != rec.frame_id)
      throw std::runtime_error("run: poses.csv and odometry.csv frame ids disagree");
    const PolarImage img = load_pgm(ds.image_path(rec), ds.sensor);
    SonarFrame frame = make_frame(img, cfg.frame, rec.frame_id, rec.timestamp_s, orec.pose);

    if (cfg.dump_context) {
      char name[48];
      std::snprintf(name, sizeof(name), "frame_%06lld.csv",
                    static_cast<long long>(frame.frame_id));
      dump_context_csv(frame.context, cfg.out_dir / "context" / name);
    }
    if (cfg.dump_clouds) {
      char name[48];
      std::snprintf(name, sizeof(name), "frame_%06lld.csv",
                    static_cast<long long>(frame.frame_id));
      dump_cloud_csv(frame.cloud, cfg.out_dir / "clouds" / name);
    }

    // Retrieve against earlier frames only, then register this frame's key.
    const auto candidates = index.query(frame.frame_id, frame.polar_key, cfg.retrieval);
    if (!candidates.empty()) {
      // Score every proposed candidate; keep the best context distance.
      MatchResult best{};
      std::int64_t best_id = -1;
      for (const Candidate& cand : candidates) {
        const SonarFrame& cframe = frames[frame_slot.at(cand.frame_id)];
        const MatchResult r = adaptive_match(frame.context, cframe.context, cfg.matching);
        if (best_id < 0 || r.distance < best.distance ||
            (r.distance == best.distance && cand.frame_id < best_id)) {
          best = r;
          best_id = cand.frame_id;
        }
      }
      ++summary.match_records;
      match_log << frame.frame_id << "," << best_id << "," << fmt(best.distance) << ","
                << best.col_shift_n << "," << best.row_shift_m << ","
                << (best.accepted ? 1 : 0) << "\n";

      if (best.accepted) {
        ++summary.accepted_matches;
        const SonarFrame& cframe = frames[frame_slot.at(best_id)];
        const LoopFactorResult lf = make_loop_factor(frame, cframe, best, cfg.icp);
        const SE2& m = lf.accepted() ? lf.factor->measurement : best.init_pose;
        factor_log << frame.frame_id << "," << best_id << "," << fmt(m.x) << "," << fmt(m.y)
                   << "," << fmt(m.yaw) << "," << fmt(lf.icp.rms_m) << ","
                   << (lf.accepted() ? 1 : 0) << "," << lf.reject_reason << "\n";
        if (lf.accepted()) {
          ++summary.accepted_loops;
          loops.push_back(*lf.factor);
        }
      }
    }
    index.insert(frame.frame_id, frame.polar_key);
    frame_slot[frame.frame_id] = frames.size();
    frames.push_back(std::move(frame));
  }

  save_keys_jsonl(index, cfg.out_dir / "keys.jsonl");

  // Pose graph: nodes at odometry, odometry factors weighted by the assumed
  // noise model, accepted loop factors.
  PoseGraph graph;
  for (const auto& f : frames) graph.add_node(f.frame_id, f.odom_pose);
  for (size_t k = 0; k + 1 < frames.size(); ++k) {
    const SE2 rel = frames[k].odom_pose.between(frames[k + 1].odom_pose);
    const double st = std::max(cfg.odom_info.sigma_trans_per_m * rel.translation_norm(),
                               cfg.odom_info.sigma_trans_floor_m);
    const double sy = std::max(cfg.odom_info.sigma_yaw_per_rad * std::abs(rel.yaw),
                               cfg.odom_info.sigma_yaw_floor_rad);
    Eigen::Matrix3d info = Eigen::Matrix3d::Zero();
    info(0, 0) = info(1, 1) = 1.0 / (st * st);
    info(2, 2) = 1.0 / (sy * sy);
    graph.add_odom_factor(frames[k].frame_id, frames[k + 1].frame_id, rel, info);
  }
  for (const LoopFactor& f : loops) graph.add_loop_factor(f);

  save_graph_csv(graph, cfg.out_dir / "graph.csv");
  summary.initial_graph_cost = graph.cost();
  const OptimizeResult opt = graph.optimize(cfg.pose_graph);
  summary.optimized_graph_cost = opt.final_cost;
  save_graph_csv(graph, cfg.out_dir / "graph_optimized.csv");

  std::ofstream eff(cfg.out_dir / "effective_config.json");
  eff << run_config_to_json(cfg) << "\n";
  return summary;
}

std::vector<MatchLogRow> load_match_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_match_log: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "query_id,cand_id,distance,n_shift,m_shift,accepted")
    throw std::runtime_error("load_match_log: bad header in " + path.string());
  std::vector<MatchLogRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[6];
    for (int i = 0; i < 6; ++i)
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error("load_match_log: malformed row '" + line + "'");
    rows.push_back({std::stoll(f[0]), std::stoll(f[1]), std::stod(f[2]), std::stoi(f[3]),
                    std::stoi(f[4]), f[5] == "1"});
  }
  return rows;
}

EvalSummary run_evaluation(const RunConfig& cfg) {
  cfg.validate();
  const Dataset ds = load_dataset(cfg.dataset_dir);
  const auto rows = load_match_log(cfg.out_dir / "match_log.csv");
  const PoseGraph optimized = load_graph_csv(cfg.out_dir / "graph_optimized.csv");

  std::map<std::int64_t, SE2> gt_poses;
  std::vector<std::pair<std::int64_t, SE2>> gt_traj;
  for (const PoseRecord& r : ds.ground_truth) {
    gt_poses[r.frame_id] = r.pose;
    gt_traj.emplace_back(r.frame_id, r.pose);
  }

  std::vector<eval::DetectionRecord> records;
  records.reserve(rows.size());
  for (const MatchLogRow& r : rows)
    records.push_back({r.query_id, r.cand_id, r.distance, 0.0, 0.0});
  eval::annotate_records(records, gt_poses);

  eval::EvalConfig ecfg;
  ecfg.tp_distance_m = cfg.eval.tp_distance_m;
  ecfg.exclusion_gap = cfg.retrieval.exclusion_gap;
  ecfg.tau_grid = eval::tau_grid(cfg.eval.tau_start, cfg.eval.tau_stop, cfg.eval.tau_step);

  const auto curve = eval::pr_curve(records, gt_poses, ecfg);

  // Operating point: the accepted flag written by the run.
  std::vector<eval::DetectionRecord> accepted_tp;
  std::vector<std::int64_t> tp_query_ids;
  EvalSummary summary;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].accepted) continue;
    if (records[i].gt_separation_m <= ecfg.tp_distance_m) {
      accepted_tp.push_back(records[i]);
      tp_query_ids.push_back(records[i].query_id);
      ++summary.accepted_true_positives;
    } else {
      ++summary.accepted_false_positives;
    }
  }
  const int accepted_total =
      summary.accepted_true_positives + summary.accepted_false_positives;
  summary.precision_at_accept =
      accepted_total == 0
          ? 1.0
          : static_cast<double>(summary.accepted_true_positives) / accepted_total;

  // Recall among opportunity queries uses the same definition as pr_curve.
  {
    std::set<std::int64_t> opp;
    for (auto qi = gt_poses.begin(); qi != gt_poses.end(); ++qi)
      for (auto ci = gt_poses.begin(); ci != qi; ++ci) {
        if (ci->first > qi->first - ecfg.exclusion_gap && ci->first <= qi->first) continue;
        if (std::hypot(qi->second.x - ci->second.x, qi->second.y - ci->second.y) <=
            ecfg.tp_distance_m) {
          opp.insert(qi->first);
          break;
        }
      }
    const std::set<std::int64_t> tp_set(tp_query_ids.begin(), tp_query_ids.end());
    summary.recall_at_accept =
        opp.empty() ? 0.0
                    : static_cast<double>(tp_set.size()) / static_cast<double>(opp.size());
  }

  const auto hist = eval::overlap_histogram(accepted_tp);
  const auto blind = eval::blind_traversal(tp_query_ids, gt_traj);
  summary.max_blind_gap_m = blind.max_gap_m;

  std::vector<SE2> gt_vec, odom_vec, opt_vec;
  for (const PoseRecord& r : ds.ground_truth) gt_vec.push_back(r.pose);
  for (const PoseRecord& r : ds.odometry) odom_vec.push_back(r.pose);
  for (const PoseRecord& r : ds.ground_truth) {
    if (!optimized.has_node(r.frame_id))
      throw std::runtime_error("eval: optimized graph is missing frame " +
                               std::to_string(r.frame_id));
    opt_vec.push_back(optimized.nodes().at(r.frame_id));
  }
  const auto odom_err = eval::trajectory_error(odom_vec, gt_vec);
  const auto opt_err = eval::trajectory_error(opt_vec, gt_vec);
  summary.odom_rmse_m = odom_err.rmse_m;
  summary.optimized_rmse_m = opt_err.rmse_m;

  const auto eval_dir = cfg.out_dir / "eval";
  std::filesystem::create_directories(eval_dir);
  summary.eval_dir = eval_dir;

  {
    std::ofstream out(eval_dir / "pr_curve.csv");
    out << "tau,precision,recall,true_positives,false_positives,detections\n";
    for (const auto& p : curve)
      out << fmt(p.tau) << "," << fmt(p.precision) << "," << fmt(p.recall) << ","
          << p.true_positives << "," << p.false_positives << "," << p.detections << "\n";
  }
  {
    std::ofstream out(eval_dir / "overlap_hist.csv");
    out << "kind,bin_lo,bin_hi,count\n";
    for (size_t b = 0; b < hist.rotation_counts.size(); ++b)
      out << "rotation_deg," << fmt(b * hist.rotation_bin_deg) << ","
          << fmt((b + 1) * hist.rotation_bin_deg) << "," << hist.rotation_counts[b] << "\n";
    for (size_t b = 0; b < hist.separation_counts.size(); ++b)
      out << "separation_m," << fmt(b * hist.separation_bin_m) << ","
          << fmt((b + 1) * hist.separation_bin_m) << "," << hist.separation_counts[b] << "\n";
  }
  {
    std::ofstream out(eval_dir / "blind_traversal.csv");
    out << "segment,gap_m\n";
    for (size_t i = 0; i < blind.gaps_m.size(); ++i)
      out << i << "," << fmt(blind.gaps_m[i]) << "\n";
  }
  {
    std::ofstream out(eval_dir / "traj_error.csv");
    out << "frame_id,odom_error_m,optimized_error_m\n";
    for (size_t k = 0; k < gt_vec.size(); ++k)
      out << ds.ground_truth[k].frame_id << "," << fmt(odom_err.per_frame_m[k]) << ","
          << fmt(opt_err.per_frame_m[k]) << "\n";
  }
  {
    nlohmann::json meta;
    meta["tp_distance_m"] = ecfg.tp_distance_m;
    meta["exclusion_gap"] = ecfg.exclusion_gap;
    meta["tau_grid"] = {{"start", cfg.eval.tau_start},
                        {"stop", cfg.eval.tau_stop},
                        {"step", cfg.eval.tau_step}};
    meta["definitions"] = {
        {"detection", "match-log distance <= tau"},
        {"true_positive", "detection with ground-truth separation <= tp_distance_m"},
        {"recall_denominator",
         "queries with an earlier frame outside the exclusion window within tp_distance_m"},
        {"precision_at_zero_detections", 1.0},
        {"blind_traversal",
         "ground-truth arc length between consecutive accepted true-positive queries"}};
    meta["odom_rmse_m"] = summary.odom_rmse_m;
    meta["optimized_rmse_m"] = summary.optimized_rmse_m;
    meta["max_blind_gap_m"] = summary.max_blind_gap_m;
    meta["precision_at_accept"] = summary.precision_at_accept;
    meta["recall_at_accept"] = summary.recall_at_accept;
    meta["accepted_true_positives"] = summary.accepted_true_positives;
    meta["accepted_false_positives"] = summary.accepted_false_positives;
    std::ofstream out(eval_dir / "eval_meta.json");
    out << meta.dump(2) << "\n";
  }
  return summary;
}

}  // namespace socon
