#include "socon/points.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace socon {

PolarImage median_filter(const PolarImage& img, int kernel) {
  const int W = img.width(), H = img.height();
  if (kernel < 1 || kernel % 2 == 0)
    throw std::invalid_argument("median_filter: kernel must be odd and >= 1");
  if (kernel > std::min(W, H))
    throw std::invalid_argument("median_filter: kernel exceeds image size");
  if (kernel == 1) return img;

  const int half = kernel / 2;
  Eigen::MatrixXd out(H, W);
  std::vector<double> window(static_cast<size_t>(kernel) * kernel);
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      size_t n = 0;
      for (int dv = -half; dv <= half; ++dv) {
        const int vv = std::clamp(v + dv, 0, H - 1);
        for (int du = -half; du <= half; ++du) {
          const int uu = std::clamp(u + du, 0, W - 1);
          window[n++] = img.pixels(vv, uu);
        }
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
      out(v, u) = *mid;
    }
  }
  return PolarImage(img.sensor, std::move(out));
}

namespace {

constexpr int kBins = 256;

inline int intensity_bin(double x) {
  const int b = static_cast<int>(x * kBins);
  return std::min(b, kBins - 1);
}

std::array<std::int64_t, kBins> histogram_256(const PolarImage& img) {
  std::array<std::int64_t, kBins> hist{};
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i)
    ++hist[intensity_bin(img.pixels.data()[i])];
  return hist;
}

}  // namespace

double otsu_threshold(const PolarImage& img) {
  const auto hist = histogram_256(img);
  const std::int64_t total = img.pixels.size();

  int occupied = 0;
  for (int b = 0; b < kBins; ++b)
    if (hist[b] > 0) ++occupied;
  if (occupied < 2)
    throw DegenerateHistogramError("otsu_threshold: single-level histogram");

  double sum_total = 0.0;  // exact: integer-valued and far below 2^53
  for (int b = 0; b < kBins; ++b) sum_total += static_cast<double>(b) * hist[b];

  // Classes at split t: bins [0, t] vs (t, 255]. Highest between-class
  // variance wins; the lowest such t on ties.
  int best_t = 0;
  double best_var = -1.0;
  std::int64_t w0 = 0;
  double sum0 = 0.0;
  for (int t = 0; t < kBins - 1; ++t) {
    w0 += hist[t];
    sum0 += static_cast<double>(t) * hist[t];
    const std::int64_t w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = sum0 / static_cast<double>(w0);
    const double mu1 = (sum_total - sum0) / static_cast<double>(w1);
    const double var = static_cast<double>(w0) * static_cast<double>(w1) * (mu0 - mu1) *
                       (mu0 - mu1);
    if (var > best_var) {
      best_var = var;
      best_t = t;
    }
  }
  return static_cast<double>(best_t + 1) / kBins;
}

PointCloud2D extract_points(const PolarImage& img, double band_lo, double band_hi,
                            int max_points) {
  if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= 1.0))
    throw std::invalid_argument("extract_points: need 0 <= band_lo < band_hi <= 1");
  if (max_points < 1) throw std::invalid_argument("extract_points: max_points must be >= 1");

  const double threshold = otsu_threshold(img);
  const int W = img.width(), H = img.height();

  struct Hit {
    int u, v;
    double intensity;
  };
  std::vector<Hit> hits;
  for (int v = 0; v < H; ++v) {
    if (v < band_lo * H || v >= band_hi * H) continue;
    for (int u = 0; u < W; ++u) {
      const double val = img.pixels(v, u);
      if (val >= threshold) hits.push_back({u, v, val});
    }
  }
  if (static_cast<int>(hits.size()) > max_points) {
    std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      if (a.intensity != b.intensity) return a.intensity > b.intensity;
      if (a.v != b.v) return a.v < b.v;
      return a.u < b.u;
    });
    hits.resize(static_cast<size_t>(max_points));
  }

  PointCloud2D cloud;
  cloud.points.reserve(hits.size());
  for (const Hit& h : hits) {
    SonarPoint p = cartesian_of(h.u, h.v, img.sensor);
    cloud.points.push_back({p.x_s, p.y_s, h.intensity});
  }
  return cloud;
}

SonarFrame make_frame(const PolarImage& img, const FrameConfig& cfg, std::int64_t frame_id,
                      double timestamp_s, const SE2& odom_pose) {
  cfg.validate();
  SonarFrame frame;
  frame.frame_id = frame_id;
  frame.timestamp_s = timestamp_s;
  frame.odom_pose = odom_pose;
  frame.context = make_context(img, cfg.patch_w, cfg.patch_h);
  frame.polar_key = make_polar_key(frame.context);
  try {
    const PolarImage filtered = median_filter(img, cfg.points.median_kernel);
    frame.cloud = extract_points(filtered, cfg.points.band_lo, cfg.points.band_hi,
                                 cfg.points.max_points);
  } catch (const DegenerateHistogramError&) {
    frame.cloud = {};
  }
  return frame;
}

void dump_cloud_csv(const PointCloud2D& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_cloud_csv: cannot open " + path.string());
  out << "x_m,y_m,intensity\n";
  char buf[96];
  for (const CloudPoint& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x_m, p.y_m, p.intensity);
    out << buf;
  }
}

}  // namespace socon
