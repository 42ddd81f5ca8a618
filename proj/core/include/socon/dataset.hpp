#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "socon/geometry.hpp"
#include "socon/sensor.hpp"

namespace socon {

struct PoseRecord {
  std::int64_t frame_id = 0;
  double timestamp_s = 0.0;
  SE2 pose;
  std::string image_file;
};

/**
 * Dataset directory layout: sensor.json, poses.csv (ground truth),
 * optional odometry.csv (same schema), and the PGM images referenced by the
 * image_file column.
 */
struct Dataset {
  std::filesystem::path dir;
  SensorModel sensor;
  std::vector<PoseRecord> ground_truth;
  std::vector<PoseRecord> odometry;  // falls back to ground_truth when absent
  bool has_odometry = false;

  std::filesystem::path image_path(const PoseRecord& rec) const { return dir / rec.image_file; }
};

Dataset load_dataset(const std::filesystem::path& dir);

SensorModel load_sensor_json(const std::filesystem::path& path);
void save_sensor_json(const SensorModel& sensor, const std::filesystem::path& path);

/// Header: frame_id,timestamp_s,x_m,y_m,yaw_rad,image_file
std::vector<PoseRecord> load_poses_csv(const std::filesystem::path& path);
void save_poses_csv(const std::vector<PoseRecord>& records, const std::filesystem::path& path);

}  // namespace socon
