#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "bibt/polya_gamma.hpp"
#include "bibt/rng.hpp"
#include "pg_series_oracle.hpp"
#include "test_stats.hpp"

using namespace bibt;
namespace bt = bibt::testing;

namespace {

std::vector<double> draw_many(long b, double c, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = pg_draw({b, c}, rng);
  return out;
}

}  // namespace

TEST_CASE("closed-form moments") {
  CHECK(pg_mean({1, 0.0}) == doctest::Approx(0.25));
  CHECK(pg_mean({4, 0.0}) == doctest::Approx(1.0));
  CHECK(pg_mean({1, -3.0}) == doctest::Approx(pg_mean({1, 3.0})));
  CHECK(pg_mean({2, 1.0}) == doctest::Approx(std::tanh(0.5)));
  CHECK(pg_variance({1, 0.0}) == doctest::Approx(1.0 / 24.0));
  // continuity of the small-tilt branches
  CHECK(pg_mean({1, 1e-4}) == doctest::Approx(pg_mean({1, 2e-4})).epsilon(1e-7));
  CHECK(pg_variance({1, 1e-2}) == doctest::Approx(pg_variance({1, 1.0000001e-2})));
  CHECK_THROWS_AS(pg_mean({-1, 0.0}), std::invalid_argument);
}

TEST_CASE("degenerate shape") {
  Rng rng(1);
  CHECK(pg_draw({0, 0.0}, rng) == 0.0);
  CHECK(pg_draw({0, 123.4}, rng) == 0.0);
}

TEST_CASE("sampler matches closed-form moments") {
  const int n = 20000;
  int case_id = 0;
  for (long b : {1L, 2L, 20L}) {
    for (double c : {0.0, 0.5, 2.0, 10.0}) {
      const auto draws = draw_many(b, c, n, 100 + case_id++);
      const double expected = pg_mean({b, c});
      const double mcse = std::sqrt(pg_variance({b, c}) / n);
      CHECK(std::abs(bt::sample_mean(draws) - expected) < 4.0 * mcse);
      // variance within a loose band
      CHECK(bt::sample_variance(draws) ==
            doctest::Approx(pg_variance({b, c})).epsilon(0.1));
    }
  }
}

TEST_CASE("agreement with the series-representation oracle") {
  const int n = 20000;
  for (auto [b, c] : {std::pair<long, double>{1, 0.0}, {1, 2.5}, {3, 1.0}}) {
    Rng oracle_rng(555);
    bt::PgSeriesOracle oracle(b, c);
    std::vector<double> reference(n);
    for (int i = 0; i < n; ++i) reference[i] = oracle.draw(oracle_rng);
    const auto draws = draw_many(b, c, n, 556);
    CHECK(bt::ks_two_sample_pass(draws, reference, 0.01));
  }
}

TEST_CASE("sign symmetry") {
  const int n = 20000;
  const auto pos = draw_many(1, 1.5, n, 777);
  const auto neg = draw_many(1, -1.5, n, 778);
  CHECK(bt::ks_two_sample_pass(pos, neg, 0.01));
}

TEST_CASE("additivity in the shape parameter") {
  const int n = 20000;
  const auto direct = draw_many(2, 1.0, n, 901);
  Rng rng(902);
  std::vector<double> summed(n);
  for (int i = 0; i < n; ++i) {
    summed[i] = pg_draw({1, 1.0}, rng) + pg_draw({1, 1.0}, rng);
  }
  CHECK(bt::ks_two_sample_pass(direct, summed, 0.01));
}

TEST_CASE("determinism") {
  const auto a = draw_many(3, 0.7, 100, 42);
  const auto b = draw_many(3, 0.7, 100, 42);
  CHECK(a == b);
}

TEST_CASE("gaussian escape hatch for large shapes") {
  Rng rng(4040);
  PgOptions opts;
  opts.gaussian_approx_for_large_b = true;
  opts.gaussian_approx_threshold = 100;
  const PgParams params{5000, 1.0};
  double total = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) total += pg_draw(params, rng, opts);
  const double mcse = std::sqrt(pg_variance(params) / n);
  CHECK(std::abs(total / n - pg_mean(params)) < 5.0 * mcse);
}
