#include "socon/pgm_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace socon {
namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("PGM " + path.string() + ": " + what);
}

// Next whitespace-delimited token, skipping '#' comments to end of line.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

long parse_long(std::istream& in, const std::filesystem::path& path, const char* field) {
  const std::string tok = next_token(in);
  if (tok.empty()) fail(path, std::string("missing ") + field);
  try {
    size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    fail(path, std::string("bad ") + field + " '" + tok + "'");
  }
}

}  // namespace

PolarImage load_pgm(const std::filesystem::path& path, const SensorModel& sensor) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') fail(path, "not a binary PGM (expected P5)");

  const long w = parse_long(in, path, "width");
  const long h = parse_long(in, path, "height");
  const long maxval = parse_long(in, path, "maxval");
  if (w <= 0 || h <= 0) fail(path, "non-positive dimensions");
  if (maxval != 255) fail(path, "maxval must be 255, got " + std::to_string(maxval));
  if (w != sensor.width_px || h != sensor.height_px)
    fail(path, "dimensions " + std::to_string(w) + "x" + std::to_string(h) +
                   " do not match manifest sensor " + std::to_string(sensor.width_px) + "x" +
                   std::to_string(sensor.height_px));
  // Exactly one whitespace byte separates the header from pixel data.

  std::vector<unsigned char> bytes(static_cast<size_t>(w) * static_cast<size_t>(h));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<size_t>(in.gcount()) != bytes.size()) fail(path, "truncated pixel data");

  Eigen::MatrixXd px(h, w);
  for (long v = 0; v < h; ++v)
    for (long u = 0; u < w; ++u)
      px(v, u) = bytes[static_cast<size_t>(v) * w + u] / 255.0;
  return PolarImage(sensor, std::move(px));
}

void save_pgm(const PolarImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> bytes(static_cast<size_t>(img.width()) * img.height());
  for (int v = 0; v < img.height(); ++v)
    for (int u = 0; u < img.width(); ++u) {
      const double q = std::round(img.pixels(v, u) * 255.0);
      bytes[static_cast<size_t>(v) * img.width() + u] = static_cast<unsigned char>(q);
    }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(path, "write failed");
}

}  // namespace socon
