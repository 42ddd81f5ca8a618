#include "socon/matching.hpp"

#include <algorithm>
#include <cmath>

namespace socon {
namespace {

void require_same_shape(const SonarContext& a, const SonarContext& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(who) + ": context shapes differ");
}

double cosine_term(double dot, double nq_sq, double nc_sq) {
  // sqrt(nq*nc) rather than sqrt(nq)*sqrt(nc): for identical vectors the
  // ratio is exactly 1 and the self-distance exactly 0.
  const double cosv = dot / std::sqrt(nq_sq * nc_sq);
  return 1.0 - std::min(1.0, std::max(-1.0, cosv));
}

}  // namespace

SonarContext shift_context(const SonarContext& ctx, int n, int m) {
  const int R = ctx.rows(), A = ctx.cols();
  if (std::abs(n) > A || std::abs(m) > R)
    throw std::invalid_argument("shift_context: |n| <= A and |m| <= R required");
  SonarContext out = ctx;
  out.values.setZero();
  for (int i = 0; i < A; ++i) {
    const int src_i = i - n;
    if (src_i < 0 || src_i >= A) continue;
    for (int j = 0; j < R; ++j) {
      const int src_j = j - m;
      if (src_j < 0 || src_j >= R) continue;
      out.values(j, i) = ctx.values(src_j, src_i);
    }
  }
  return out;
}

double column_distance(const SonarContext& iq, const SonarContext& ic,
                       double min_valid_columns) {
  require_same_shape(iq, ic, "column_distance");
  const int R = iq.rows(), A = iq.cols();
  int valid = 0;
  double sum = 0.0;
  for (int i = 0; i < A; ++i) {
    double dot = 0.0, nq = 0.0, nc = 0.0;
    for (int j = 0; j < R; ++j) {
      const double qv = iq.values(j, i);
      const double cv = ic.values(j, i);
      dot += qv * cv;
      nq += qv * qv;
      nc += cv * cv;
    }
    if (nq > 0.0 && nc > 0.0) {
      ++valid;
      sum += cosine_term(dot, nq, nc);
    }
  }
  if (static_cast<double>(valid) / A < min_valid_columns) return 1.0;
  return sum / valid;
}

double row_distance(const SonarContext& iq, const SonarContext& ic, double min_valid_rows) {
  require_same_shape(iq, ic, "row_distance");
  const int R = iq.rows(), A = iq.cols();
  int valid = 0;
  double sum = 0.0;
  for (int j = 0; j < R; ++j) {
    double dot = 0.0, nq = 0.0, nc = 0.0;
    for (int i = 0; i < A; ++i) {
      const double qv = iq.values(j, i);
      const double cv = ic.values(j, i);
      dot += qv * cv;
      nq += qv * qv;
      nc += cv * cv;
    }
    if (nq > 0.0 && nc > 0.0) {
      ++valid;
      sum += cosine_term(dot, nq, nc);
    }
  }
  if (static_cast<double>(valid) / R < min_valid_rows) return 1.0;
  return sum / valid;
}

namespace {

// Score of one shift cell without materializing the shifted context.
// Accumulation order matches column_distance over shift_context exactly, so
// the two routes agree bitwise (skipped terms are exact zeros).
struct CellScore {
  double distance;
  double valid_fraction;
};

CellScore score_cell(const SonarContext& iq, const SonarContext& ic, int n, int m,
                     double min_valid_columns) {
  const int R = iq.rows(), A = iq.cols();
  const int j_lo = std::max(0, m);
  const int j_hi = std::min(R, R + m);
  int valid = 0;
  double sum = 0.0;
  for (int i = 0; i < A; ++i) {
    double nq = 0.0;
    for (int j = 0; j < R; ++j) {
      const double qv = iq.values(j, i);
      nq += qv * qv;
    }
    const int src_i = i - n;
    double dot = 0.0, nc = 0.0;
    if (src_i >= 0 && src_i < A) {
      for (int j = j_lo; j < j_hi; ++j) {
        const double qv = iq.values(j, i);
        const double cv = ic.values(j - m, src_i);
        dot += qv * cv;
        nc += cv * cv;
      }
    }
    if (nq > 0.0 && nc > 0.0) {
      ++valid;
      sum += cosine_term(dot, nq, nc);
    }
  }
  const double fraction = static_cast<double>(valid) / A;
  if (fraction < min_valid_columns) return {1.0, fraction};
  return {sum / valid, fraction};
}

// Deterministic tie order: smaller |n|, then smaller |m|, then negative first.
bool cell_precedes(int n_a, int m_a, int n_b, int m_b) {
  const int abs_na = std::abs(n_a), abs_nb = std::abs(n_b);
  if (abs_na != abs_nb) return abs_na < abs_nb;
  const int abs_ma = std::abs(m_a), abs_mb = std::abs(m_b);
  if (abs_ma != abs_mb) return abs_ma < abs_mb;
  if ((n_a > 0) != (n_b > 0)) return n_b > 0;
  return (m_a > 0) != (m_b > 0) && m_b > 0;
}

}  // namespace

MatchResult adaptive_match(const SonarContext& iq, const SonarContext& ic,
                           const MatchConfig& cfg) {
  cfg.validate();
  require_same_shape(iq, ic, "adaptive_match");
  const int max_n = cfg.max_col_shift(iq.cols());
  const int max_m = cfg.max_row_shift(iq.rows());

  MatchResult best;
  bool first = true;
  for (int n = -max_n; n <= max_n; ++n) {
    for (int m = -max_m; m <= max_m; ++m) {
      const CellScore s = score_cell(iq, ic, n, m, cfg.min_valid_columns);
      const bool wins =
          first || s.distance < best.distance ||
          (s.distance == best.distance && cell_precedes(n, m, best.col_shift_n, best.row_shift_m));
      if (wins) {
        best.distance = s.distance;
        best.valid_fraction = s.valid_fraction;
        best.col_shift_n = n;
        best.row_shift_m = m;
        first = false;
      }
    }
  }
  best.accepted = best.distance <= cfg.accept_threshold &&
                  best.valid_fraction >= cfg.min_valid_columns;
  best.init_pose = initial_pose(best, iq);
  return best;
}

SE2 initial_pose(const MatchResult& result, const SonarContext& query_ctx) {
  const SensorModel& sensor = query_ctx.sensor;
  const double dyaw = result.col_shift_n * query_ctx.patch_w / sensor.alpha();
  const double dfwd = result.row_shift_m * query_ctx.patch_h / sensor.beta();
  return SE2(dfwd, 0.0, dyaw);
}

}  // namespace socon
