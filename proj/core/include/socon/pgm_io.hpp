#pragma once

#include <filesystem>

#include "socon/polar_image.hpp"

namespace socon {

/**
 * Load a binary 8-bit greyscale PGM ("P5", maxval 255) as a polar image.
 * Sensor metadata comes from the dataset manifest; dimensions must match.
 * Intensity = byte / 255. Throws std::runtime_error on malformed input.
 */
PolarImage load_pgm(const std::filesystem::path& path, const SensorModel& sensor);

/// Write img as binary PGM P5, maxval 255 (byte = round(intensity * 255)).
void save_pgm(const PolarImage& img, const std::filesystem::path& path);

}  // namespace socon
