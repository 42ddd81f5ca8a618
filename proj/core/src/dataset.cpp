#include "socon/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace socon {
namespace {

const char* kPosesHeader = "frame_id,timestamp_s,x_m,y_m,yaw_rad,image_file";

}  // namespace

SensorModel load_sensor_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sensor_json: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_sensor_json: " + path.string() + ": " + e.what());
  }
  SensorModel s;
  s.fov_deg = j.at("fov_deg").get<double>();
  s.min_range_m = j.at("min_range_m").get<double>();
  s.max_range_m = j.at("max_range_m").get<double>();
  s.width_px = j.at("width_px").get<int>();
  s.height_px = j.at("height_px").get<int>();
  s.validate();
  return s;
}

void save_sensor_json(const SensorModel& sensor, const std::filesystem::path& path) {
  nlohmann::json j;
  j["fov_deg"] = sensor.fov_deg;
  j["min_range_m"] = sensor.min_range_m;
  j["max_range_m"] = sensor.max_range_m;
  j["width_px"] = sensor.width_px;
  j["height_px"] = sensor.height_px;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sensor_json: cannot open " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<PoseRecord> load_poses_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_poses_csv: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kPosesHeader)
    throw std::runtime_error("load_poses_csv: " + path.string() + ": bad header, expected '" +
                             kPosesHeader + "'");
  std::vector<PoseRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[6];
    for (int i = 0; i < 6; ++i)
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error("load_poses_csv: malformed row '" + line + "'");
    PoseRecord rec;
    rec.frame_id = std::stoll(f[0]);
    rec.timestamp_s = std::stod(f[1]);
    rec.pose = SE2(std::stod(f[2]), std::stod(f[3]), std::stod(f[4]));
    rec.image_file = f[5];
    records.push_back(std::move(rec));
  }
  return records;
}

void save_poses_csv(const std::vector<PoseRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_poses_csv: cannot open " + path.string());
  out << kPosesHeader << "\n";
  char buf[160];
  for (const PoseRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g,%.17g,%.17g,",
                  static_cast<long long>(r.frame_id), r.timestamp_s, r.pose.x, r.pose.y,
                  r.pose.yaw);
    out << buf << r.image_file << "\n";
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.dir = dir;
  ds.sensor = load_sensor_json(dir / "sensor.json");
  ds.ground_truth = load_poses_csv(dir / "poses.csv");
  if (ds.ground_truth.empty())
    throw std::runtime_error("load_dataset: " + dir.string() + " has no frames");
  const auto odom_path = dir / "odometry.csv";
  if (std::filesystem::exists(odom_path)) {
    ds.odometry = load_poses_csv(odom_path);
    ds.has_odometry = true;
    if (ds.odometry.size() != ds.ground_truth.size())
      throw std::runtime_error("load_dataset: odometry.csv and poses.csv row counts differ");
  } else {
    ds.odometry = ds.ground_truth;
  }
  return ds;
}

}  // namespace socon
