#pragma once

#include "bibt/rng.hpp"

namespace bibt {

/// Parameters of the Polya-Gamma distribution PG(b, c): integer shape b >= 0
/// (number of Bernoulli trials behind the augmented likelihood term) and real
/// tilt c (the log-odds it conditions on). PG(0, c) is the point mass at 0 and
/// the distribution depends on c only through |c|.
struct PgParams {
  long b = 1;
  double c = 0.0;
};

struct PgOptions {
  /// When enabled, draws with b above the threshold use a moment-matched
  /// Gaussian (truncated at 0) instead of summing b exact PG(1, c) variates.
  bool gaussian_approx_for_large_b = false;
  long gaussian_approx_threshold = 1000;
};

/// One exact draw from PG(b, c): an alternating-series rejection sampler for
/// PG(1, c), summed b times. The rejection loop accepts with probability near
/// one for all tilts. Throws std::invalid_argument for b < 0 or non-finite c.
double pg_draw(const PgParams& params, Rng& rng);
double pg_draw(const PgParams& params, Rng& rng, const PgOptions& options);

/// Closed-form mean: b/4 at c = 0, else (b / (2c)) tanh(c / 2).
double pg_mean(const PgParams& params);

/// Closed-form variance: b/24 at c = 0, else
/// b (sinh(c) - c) sech^2(c/2) / (4 c^3).
double pg_variance(const PgParams& params);

}  // namespace bibt
