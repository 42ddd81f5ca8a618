#include "socon/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

namespace socon {
namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw std::invalid_argument("config: '" + where + "' must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" +
                                  (where.empty() ? key : where + "." + key) + "'");
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it != obj.end()) it->get_to(out);
}

SensorModel parse_sensor(const json& j, const std::string& where) {
  require_keys(j, where, {"fov_deg", "min_range_m", "max_range_m", "width_px", "height_px"});
  SensorModel s;
  get_to(j, "fov_deg", s.fov_deg);
  get_to(j, "min_range_m", s.min_range_m);
  get_to(j, "max_range_m", s.max_range_m);
  get_to(j, "width_px", s.width_px);
  get_to(j, "height_px", s.height_px);
  s.validate();
  return s;
}

ScenarioConfig parse_scenario(const json& j) {
  require_keys(j, "scenario", {"sensor", "render", "world", "trajectory"});
  ScenarioConfig sc;
  if (j.contains("sensor")) sc.sensor = parse_sensor(j["sensor"], "scenario.sensor");

  if (j.contains("render")) {
    const json& r = j["render"];
    require_keys(r, "scenario.render", {"r_ref_m", "speckle_weight", "noise_floor"});
    get_to(r, "r_ref_m", sc.render.r_ref_m);
    get_to(r, "speckle_weight", sc.render.speckle_weight);
    get_to(r, "noise_floor", sc.render.noise_floor);
    sc.render.validate();
  }

  const json& w = j.at("world");
  require_keys(w, "scenario.world",
               {"bounds", "scatterers", "random_scatterers", "reflectivity_range"});
  const auto bounds = w.at("bounds").get<std::vector<double>>();
  if (bounds.size() != 4)
    throw std::invalid_argument("config: scenario.world.bounds must be [min_x,min_y,max_x,max_y]");
  sc.world.min_x = bounds[0];
  sc.world.min_y = bounds[1];
  sc.world.max_x = bounds[2];
  sc.world.max_y = bounds[3];
  if (w.contains("scatterers")) {
    for (const auto& row : w["scatterers"]) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != 3)
        throw std::invalid_argument("config: scenario.world.scatterers rows are [x,y,refl]");
      sc.world.scatterers.push_back({v[0], v[1], v[2]});
    }
  }
  if (w.contains("random_scatterers")) w["random_scatterers"].get_to(sc.random_scatterers);
  if (w.contains("reflectivity_range")) {
    const auto rr = w["reflectivity_range"].get<std::vector<double>>();
    if (rr.size() != 2)
      throw std::invalid_argument("config: scenario.world.reflectivity_range must be [lo,hi]");
    sc.reflectivity_lo = rr[0];
    sc.reflectivity_hi = rr[1];
  }
  if (sc.random_scatterers < 0)
    throw std::invalid_argument("config: scenario.world.random_scatterers must be >= 0");
  if (sc.random_scatterers == 0) sc.world.validate();

  const json& t = j.at("trajectory");
  require_keys(t, "scenario.trajectory",
               {"odom_noise", "circle_two_lap", "waypoints", "revisit"});
  if (t.contains("odom_noise")) {
    const json& n = t["odom_noise"];
    require_keys(n, "scenario.trajectory.odom_noise",
                 {"sigma_trans_per_m", "sigma_yaw_per_rad"});
    get_to(n, "sigma_trans_per_m", sc.trajectory.odom_noise.sigma_trans_per_m);
    get_to(n, "sigma_yaw_per_rad", sc.trajectory.odom_noise.sigma_yaw_per_rad);
  }
  if (t.contains("circle_two_lap") == t.contains("waypoints"))
    throw std::invalid_argument(
        "config: scenario.trajectory needs exactly one of 'circle_two_lap' or 'waypoints'");
  if (t.contains("circle_two_lap")) {
    const json& c = t["circle_two_lap"];
    require_keys(c, "scenario.trajectory.circle_two_lap",
                 {"center", "radius_m", "frames_per_lap", "dt_s", "revisit_yaw_offset_deg",
                  "revisit_forward_offset_m"});
    std::vector<double> center{0.0, 0.0};
    get_to(c, "center", center);
    if (center.size() != 2)
      throw std::invalid_argument("config: circle_two_lap.center must be [x,y]");
    double radius = 20.0, dt = 0.5, yaw_off_deg = 0.0, fwd_off = 0.0;
    int fpl = 200;
    get_to(c, "radius_m", radius);
    get_to(c, "frames_per_lap", fpl);
    get_to(c, "dt_s", dt);
    get_to(c, "revisit_yaw_offset_deg", yaw_off_deg);
    get_to(c, "revisit_forward_offset_m", fwd_off);
    const auto noise = sc.trajectory.odom_noise;
    sc.trajectory = sim::make_two_lap_circle(center[0], center[1], radius, fpl, dt,
                                             deg2rad(yaw_off_deg), fwd_off, noise, 0);
  } else {
    for (const auto& row : t["waypoints"]) {
      require_keys(row, "scenario.trajectory.waypoints[]", {"t", "x", "y", "yaw"});
      sim::Waypoint wp;
      wp.timestamp_s = row.at("t").get<double>();
      wp.pose = SE2(row.at("x").get<double>(), row.at("y").get<double>(),
                    row.at("yaw").get<double>());
      sc.trajectory.waypoints.push_back(wp);
    }
    if (t.contains("revisit")) {
      const json& r = t["revisit"];
      require_keys(r, "scenario.trajectory.revisit",
                   {"from_index", "yaw_offset_deg", "forward_offset_m"});
      sim::RevisitOffset off;
      off.from_index = r.at("from_index").get<std::size_t>();
      double yaw_deg = 0.0;
      get_to(r, "yaw_offset_deg", yaw_deg);
      off.yaw_offset_rad = deg2rad(yaw_deg);
      get_to(r, "forward_offset_m", off.forward_offset_m);
      sc.trajectory.revisit = off;
    }
    sc.trajectory.validate();
  }
  return sc;
}

}  // namespace

void RunConfig::validate() const {
  frame.validate();
  retrieval.validate();
  matching.validate();
  icp.validate();
  odom_info.validate();
  pose_graph.validate();
  eval.validate();
  if (dataset_dir.empty()) throw std::invalid_argument("config: dataset_dir is required");
  if (out_dir.empty()) throw std::invalid_argument("config: out_dir is required");
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(j, "",
               {"version", "seed", "dataset_dir", "out_dir", "descriptor", "retrieval",
                "matching", "points", "icp", "odom_info", "pose_graph", "eval",
                "dump_context", "dump_clouds", "scenario"});
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1)
    throw std::invalid_argument("config: 'version' must be the integer 1");

  RunConfig cfg;
  get_to(j, "seed", cfg.seed);
  if (j.contains("dataset_dir")) cfg.dataset_dir = j["dataset_dir"].get<std::string>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();

  if (j.contains("descriptor")) {
    const json& d = j["descriptor"];
    require_keys(d, "descriptor", {"patch_w", "patch_h"});
    get_to(d, "patch_w", cfg.frame.patch_w);
    get_to(d, "patch_h", cfg.frame.patch_h);
  }
  if (j.contains("retrieval")) {
    const json& r = j["retrieval"];
    require_keys(r, "retrieval", {"exclusion_gap", "top_k"});
    get_to(r, "exclusion_gap", cfg.retrieval.exclusion_gap);
    get_to(r, "top_k", cfg.retrieval.top_k);
  }
  if (j.contains("matching")) {
    const json& m = j["matching"];
    require_keys(m, "matching", {"mu", "omega", "accept_threshold", "min_valid_columns"});
    get_to(m, "mu", cfg.matching.mu);
    get_to(m, "omega", cfg.matching.omega);
    get_to(m, "accept_threshold", cfg.matching.accept_threshold);
    get_to(m, "min_valid_columns", cfg.matching.min_valid_columns);
  }
  if (j.contains("points")) {
    const json& p = j["points"];
    require_keys(p, "points", {"median_kernel", "band_lo", "band_hi", "max_points"});
    get_to(p, "median_kernel", cfg.frame.points.median_kernel);
    get_to(p, "band_lo", cfg.frame.points.band_lo);
    get_to(p, "band_hi", cfg.frame.points.band_hi);
    get_to(p, "max_points", cfg.frame.points.max_points);
  }
  if (j.contains("icp")) {
    const json& i = j["icp"];
    require_keys(i, "icp",
                 {"max_iter", "tol_m", "max_corr_dist_m", "refine_corr_dist_m",
                  "rms_gate_m", "sigma_floor_m"});
    get_to(i, "max_iter", cfg.icp.max_iter);
    get_to(i, "tol_m", cfg.icp.tol_m);
    get_to(i, "max_corr_dist_m", cfg.icp.max_corr_dist_m);
    get_to(i, "refine_corr_dist_m", cfg.icp.refine_corr_dist_m);
    get_to(i, "rms_gate_m", cfg.icp.rms_gate_m);
    get_to(i, "sigma_floor_m", cfg.icp.sigma_floor_m);
  }
  if (j.contains("odom_info")) {
    const json& o = j["odom_info"];
    require_keys(o, "odom_info",
                 {"sigma_trans_per_m", "sigma_yaw_per_rad", "sigma_trans_floor_m",
                  "sigma_yaw_floor_rad"});
    get_to(o, "sigma_trans_per_m", cfg.odom_info.sigma_trans_per_m);
    get_to(o, "sigma_yaw_per_rad", cfg.odom_info.sigma_yaw_per_rad);
    get_to(o, "sigma_trans_floor_m", cfg.odom_info.sigma_trans_floor_m);
    get_to(o, "sigma_yaw_floor_rad", cfg.odom_info.sigma_yaw_floor_rad);
  }
  if (j.contains("pose_graph")) {
    const json& p = j["pose_graph"];
    require_keys(p, "pose_graph", {"max_iter", "tol", "huber_delta"});
    get_to(p, "max_iter", cfg.pose_graph.max_iter);
    get_to(p, "tol", cfg.pose_graph.tol);
    get_to(p, "huber_delta", cfg.pose_graph.huber_delta);
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    require_keys(e, "eval", {"tp_distance_m", "tau_start", "tau_stop", "tau_step"});
    get_to(e, "tp_distance_m", cfg.eval.tp_distance_m);
    get_to(e, "tau_start", cfg.eval.tau_start);
    get_to(e, "tau_stop", cfg.eval.tau_stop);
    get_to(e, "tau_step", cfg.eval.tau_step);
  }
  get_to(j, "dump_context", cfg.dump_context);
  get_to(j, "dump_clouds", cfg.dump_clouds);
  if (j.contains("scenario")) cfg.scenario = parse_scenario(j["scenario"]);

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["version"] = 1;
  j["seed"] = cfg.seed;
  j["dataset_dir"] = cfg.dataset_dir.string();
  j["out_dir"] = cfg.out_dir.string();
  j["descriptor"] = {{"patch_w", cfg.frame.patch_w}, {"patch_h", cfg.frame.patch_h}};
  j["retrieval"] = {{"exclusion_gap", cfg.retrieval.exclusion_gap},
                    {"top_k", cfg.retrieval.top_k}};
  j["matching"] = {{"mu", cfg.matching.mu},
                   {"omega", cfg.matching.omega},
                   {"accept_threshold", cfg.matching.accept_threshold},
                   {"min_valid_columns", cfg.matching.min_valid_columns}};
  j["points"] = {{"median_kernel", cfg.frame.points.median_kernel},
                 {"band_lo", cfg.frame.points.band_lo},
                 {"band_hi", cfg.frame.points.band_hi},
                 {"max_points", cfg.frame.points.max_points}};
  j["icp"] = {{"max_iter", cfg.icp.max_iter},
              {"tol_m", cfg.icp.tol_m},
              {"max_corr_dist_m", cfg.icp.max_corr_dist_m},
              {"refine_corr_dist_m", cfg.icp.refine_corr_dist_m},
              {"rms_gate_m", cfg.icp.rms_gate_m},
              {"sigma_floor_m", cfg.icp.sigma_floor_m}};
  j["odom_info"] = {{"sigma_trans_per_m", cfg.odom_info.sigma_trans_per_m},
                    {"sigma_yaw_per_rad", cfg.odom_info.sigma_yaw_per_rad},
                    {"sigma_trans_floor_m", cfg.odom_info.sigma_trans_floor_m},
                    {"sigma_yaw_floor_rad", cfg.odom_info.sigma_yaw_floor_rad}};
  j["pose_graph"] = {{"max_iter", cfg.pose_graph.max_iter},
                     {"tol", cfg.pose_graph.tol},
                     {"huber_delta", cfg.pose_graph.huber_delta}};
  j["eval"] = {{"tp_distance_m", cfg.eval.tp_distance_m},
               {"tau_start", cfg.eval.tau_start},
               {"tau_stop", cfg.eval.tau_stop},
               {"tau_step", cfg.eval.tau_step}};
  j["dump_context"] = cfg.dump_context;
  j["dump_clouds"] = cfg.dump_clouds;
  if (cfg.scenario) {
    const ScenarioConfig& sc = *cfg.scenario;
    json s;
    s["sensor"] = {{"fov_deg", sc.sensor.fov_deg},
                   {"min_range_m", sc.sensor.min_range_m},
                   {"max_range_m", sc.sensor.max_range_m},
                   {"width_px", sc.sensor.width_px},
                   {"height_px", sc.sensor.height_px}};
    s["render"] = {{"r_ref_m", sc.render.r_ref_m},
                   {"speckle_weight", sc.render.speckle_weight},
                   {"noise_floor", sc.render.noise_floor}};
    json w;
    w["bounds"] = {sc.world.min_x, sc.world.min_y, sc.world.max_x, sc.world.max_y};
    w["random_scatterers"] = sc.random_scatterers;
    w["reflectivity_range"] = {sc.reflectivity_lo, sc.reflectivity_hi};
    if (!sc.world.scatterers.empty()) {
      json rows = json::array();
      for (const auto& p : sc.world.scatterers) rows.push_back({p.x_m, p.y_m, p.reflectivity});
      w["scatterers"] = rows;
    }
    s["world"] = w;
    json t;
    t["odom_noise"] = {{"sigma_trans_per_m", sc.trajectory.odom_noise.sigma_trans_per_m},
                       {"sigma_yaw_per_rad", sc.trajectory.odom_noise.sigma_yaw_per_rad}};
    json wps = json::array();
    for (const auto& wp : sc.trajectory.waypoints)
      wps.push_back({{"t", wp.timestamp_s}, {"x", wp.pose.x}, {"y", wp.pose.y},
                     {"yaw", wp.pose.yaw}});
    t["waypoints"] = wps;
    if (sc.trajectory.revisit)
      t["revisit"] = {{"from_index", sc.trajectory.revisit->from_index},
                      {"yaw_offset_deg", rad2deg(sc.trajectory.revisit->yaw_offset_rad)},
                      {"forward_offset_m", sc.trajectory.revisit->forward_offset_m}};
    s["trajectory"] = t;
    j["scenario"] = s;
  }
  return j.dump(2);
}

}  // namespace socon
