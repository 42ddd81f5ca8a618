#pragma once

#include <cstdint>
#include <stdexcept>

#include "socon/descriptor.hpp"
#include "socon/geometry.hpp"

namespace socon {

struct MatchConfig {
  double mu = 0.5;                // bounded-column factor, (0, 1]
  double omega = 0.2;             // bounded-row factor, (0, 1]
  double accept_threshold = 0.25; // tau, [0, 2]
  double min_valid_columns = 0.5; // fraction of columns that must be comparable

  void validate() const {
    if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("matching.mu must be in (0, 1]");
    if (!(omega > 0.0 && omega <= 1.0))
      throw std::invalid_argument("matching.omega must be in (0, 1]");
    if (!(accept_threshold >= 0.0 && accept_threshold <= 2.0))
      throw std::invalid_argument("matching.accept_threshold must be in [0, 2]");
    if (!(min_valid_columns > 0.0 && min_valid_columns <= 1.0))
      throw std::invalid_argument("matching.min_valid_columns must be in (0, 1]");
  }

  /// Half-width of the column shift grid for a context with A columns.
  int max_col_shift(int a_cols) const { return static_cast<int>(mu * a_cols / 2.0); }
  /// Half-width of the row shift grid for a context with R rows.
  int max_row_shift(int r_rows) const { return static_cast<int>(omega * r_rows / 2.0); }
};

struct MatchResult {
  double distance = 1.0;
  int col_shift_n = 0;
  int row_shift_m = 0;
  double valid_fraction = 0.0;  // comparable-column fraction at the best shift
  bool accepted = false;
  SE2 init_pose;  // maps candidate-frame points into the query frame
};

/**
 * Translate a context by (n columns, m rows) with zero fill; no wrap-around.
 * n > 0 moves content toward higher column indices ([a b c] -> [0 a b]);
 * m > 0 moves content toward larger range rows. Over-shifting yields an
 * all-zero context.
 */
SonarContext shift_context(const SonarContext& ctx, int n, int m);

/**
 * Mean over comparable columns of (1 - cosine). A column pair is comparable
 * iff both norms are positive; if fewer than min_valid_columns * A columns
 * are comparable the reject-level sentinel 1.0 is returned.
 */
double column_distance(const SonarContext& iq, const SonarContext& ic,
                       double min_valid_columns);

/// Row-wise counterpart of column_distance.
double row_distance(const SonarContext& iq, const SonarContext& ic, double min_valid_rows);

/**
 * Exhaustive search over the bounded shift grid
 * n in [-floor(mu*A/2), +floor(mu*A/2)], m in [-floor(omega*R/2), +floor(omega*R/2)],
 * scoring column_distance(iq, shift_context(ic, n, m)). The arg-min ties are
 * broken by smaller |n|, then smaller |m|, then negative before positive.
 * Equals a brute-force double loop over the same grid.
 */
MatchResult adaptive_match(const SonarContext& iq, const SonarContext& ic,
                           const MatchConfig& cfg);

/**
 * Relative pose seed from the winning shifts: yaw = n* azimuth columns worth
 * of angle, forward = m* range rows worth of meters, as an SE2 mapping
 * candidate-frame points into the query frame.
 */
SE2 initial_pose(const MatchResult& result, const SonarContext& query_ctx);

}  // namespace socon
