#include "bibt/polya_gamma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bibt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;  // proposal switch point of the rejection sampler
const double kSmallCoef = std::pow(2.0 / kPi, 1.5);

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2_v<double> / 2.0); }

/// Per-tilt constants of the PG(1, .) proposal mixture, hoisted out of the
/// rejection loop so that summing b variates at a fixed tilt pays the two
/// erfc evaluations only once.
struct Proposal {
  double z;              // |c| / 2
  double half_z2;        // z^2 / 2
  double rate;           // pi^2 / 8 + z^2 / 2, exponential-tail rate
  double exp_threshold;  // probability of proposing from the exponential tail
  double inv_z;          // 1 / z (inf at z = 0)

  explicit Proposal(double tilt_z) : z(tilt_z) {
    half_z2 = 0.5 * z * z;
    rate = kPi * kPi / 8.0 + half_z2;
    const double exp_mass = kPi / (2.0 * rate) * std::exp(-rate * kTrunc);
    // mass of the inverse-Gaussian head, CDF of IG(1/z, 1) at the switch point
    const double sq = std::sqrt(kTrunc);
    double ig_mass = 2.0 * std::exp(-z) * std_normal_cdf((kTrunc * z - 1.0) / sq);
    if (z < 600.0) {
      ig_mass += 2.0 * std::exp(z) * std_normal_cdf(-(kTrunc * z + 1.0) / sq);
    }
    exp_threshold = exp_mass / (exp_mass + ig_mass);
    inv_z = 1.0 / z;
  }
};

/// Alternating-series coefficients of the Jacobi-type density targeted by the
/// rejection sampler.
double series_coef(int n, double x) {
  const double np = n + 0.5;
  if (x > kTrunc) return kPi * np * std::exp(-0.5 * np * np * kPi * kPi * x);
  const double inv = 1.0 / x;
  return kPi * np * kSmallCoef * inv * std::sqrt(inv) * std::exp(-2.0 * np * np * inv);
}

/// Inverse-Gaussian IG(1/z, 1) restricted to (0, kTrunc].
double draw_trunc_inverse_gaussian(const Proposal& prop, Rng& rng) {
  if (prop.z * kTrunc < 1.0) {
    // mean beyond the truncation point: sample the scaled chi-like proposal
    // and thin by the tilt factor
    while (true) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / kTrunc);
      const double x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
      if (prop.half_z2 == 0.0 || rng.uniform() <= std::exp(-prop.half_z2 * x)) {
        return x;
      }
    }
  }
  // mean inside (0, kTrunc]: plain inverse-Gaussian draws until one lands
  const double mu = prop.inv_z;
  while (true) {
    const double nu = rng.normal();
    const double w = mu * nu * nu;
    // stable form of mu + mu w / 2 - (mu / 2) sqrt(w^2 + 4 w)
    double x = mu * (1.0 - 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / w)));
    if (!(x > 0.0)) x = mu;  // w == 0 or rounding
    if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    if (x <= kTrunc) return x;
  }
}

/// One variate of the (tilted) Jacobi density; PG(1, c) = draw / 4 at
/// z = |c| / 2.
double draw_jacobi(const Proposal& prop, Rng& rng) {
  while (true) {
    double x;
    if (rng.uniform() < prop.exp_threshold) {
      x = kTrunc + rng.exponential() / prop.rate;
    } else {
      x = draw_trunc_inverse_gaussian(prop, rng);
    }
    // squeeze via the alternating partial sums
    double s = series_coef(0, x);
    const double y = rng.uniform() * s;
    int n = 0;
    while (true) {
      ++n;
      if (n & 1) {
        s -= series_coef(n, x);
        if (y <= s) return x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

void validate(const PgParams& params) {
  if (params.b < 0) {
    throw std::invalid_argument("pg_draw: shape must be nonnegative, got " +
                                std::to_string(params.b));
  }
  if (!std::isfinite(params.c)) {
    throw std::invalid_argument("pg_draw: tilt must be finite");
  }
}

}  // namespace

double pg_draw(const PgParams& params, Rng& rng) {
  return pg_draw(params, rng, PgOptions{});
}

double pg_draw(const PgParams& params, Rng& rng, const PgOptions& options) {
  validate(params);
  if (params.b == 0) return 0.0;
  if (options.gaussian_approx_for_large_b &&
      params.b > options.gaussian_approx_threshold) {
    const double m = pg_mean(params);
    const double sd = std::sqrt(pg_variance(params));
    return std::max(0.0, m + sd * rng.normal());
  }
  const Proposal prop(0.5 * std::abs(params.c));
  double total = 0.0;
  for (long i = 0; i < params.b; ++i) total += draw_jacobi(prop, rng);
  return 0.25 * total;
}

double pg_mean(const PgParams& params) {
  validate(params);
  const double b = static_cast<double>(params.b);
  const double c = std::abs(params.c);
  if (c < 1e-4) {
    // tanh(c/2) / (2c) -> 1/4 - c^2/48 + ...
    return b * (0.25 - c * c / 48.0);
  }
  return b / (2.0 * c) * std::tanh(0.5 * c);
}

double pg_variance(const PgParams& params) {
  validate(params);
  const double b = static_cast<double>(params.b);
  const double c = std::abs(params.c);
  if (c < 1e-2) {
    return b * (1.0 / 24.0 - c * c / 120.0);
  }
  const double sech = 1.0 / std::cosh(0.5 * c);
  return b * (std::sinh(c) - c) * sech * sech / (4.0 * c * c * c);
}

}  // namespace bibt
