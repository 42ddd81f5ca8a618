#include "socon/descriptor.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace socon {

SonarContext make_context(const PolarImage& img, int patch_w, int patch_h) {
  const int W = img.width(), H = img.height();
  if (patch_w < 1 || patch_h < 1)
    throw std::invalid_argument("make_context: patch sizes must be >= 1");
  if (patch_w > W || patch_h > H)
    throw std::invalid_argument("make_context: patch " + std::to_string(patch_w) + "x" +
                                std::to_string(patch_h) + " larger than image " +
                                std::to_string(W) + "x" + std::to_string(H));
  const int A = W / patch_w;
  const int R = H / patch_h;

  SonarContext ctx;
  ctx.sensor = img.sensor;
  ctx.patch_w = patch_w;
  ctx.patch_h = patch_h;
  ctx.values.resize(R, A);
  for (int j = 0; j < R; ++j)
    for (int i = 0; i < A; ++i)
      ctx.values(j, i) =
          img.pixels.block(j * patch_h, i * patch_w, patch_h, patch_w).maxCoeff();
  return ctx;
}

PolarKey make_polar_key(const SonarContext& ctx) {
  PolarKey key;
  key.values = ctx.values.rowwise().mean();
  return key;
}

void dump_context_csv(const SonarContext& ctx, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_context_csv: cannot open " + path.string());
  char buf[32];
  for (int j = 0; j < ctx.rows(); ++j) {
    for (int i = 0; i < ctx.cols(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", ctx.values(j, i));
      out << buf << (i + 1 < ctx.cols() ? "," : "");
    }
    out << "\n";
  }
}

}  // namespace socon
