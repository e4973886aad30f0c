#include <doctest.h>

#include <cmath>
#include <vector>

#include "srtmix/math.hpp"
#include "srtmix/rng.hpp"

using srtmix::Rng;

TEST_CASE("same seed reproduces the identical stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.normal() == b.normal());
    CHECK(a.gamma(2.5, 1.3) == b.gamma(2.5, 1.3));
    CHECK(a.poisson(3.7) == b.poisson(3.7));
  }
}

TEST_CASE("derive_seed separates streams") {
  const auto s0 = Rng::derive_seed(7, 0);
  const auto s1 = Rng::derive_seed(7, 1);
  const auto s2 = Rng::derive_seed(8, 0);
  CHECK(s0 != s1);
  CHECK(s0 != s2);
  CHECK(s1 != s2);
  CHECK(Rng::derive_seed(7, 0) == s0);
}

TEST_CASE("uniform stays in [0, 1) and covers the range") {
  Rng rng(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.001);
  CHECK(hi > 0.999);
}

TEST_CASE("uniform_int is unbiased over a small range") {
  Rng rng(2);
  std::vector<long> counts(5, 0);
  const long draws = 200000;
  for (long i = 0; i < draws; ++i) ++counts[rng.uniform_int(5)];
  for (const long c : counts) {
    // 5-sigma band around draws/5 (sd = sqrt(n p (1-p)) ~ 179).
    CHECK(std::abs(c - draws / 5) < 900);
  }
  CHECK_THROWS(rng.uniform_int(0));
}

TEST_CASE("bernoulli boundary probabilities") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("normal moments") {
  Rng rng(4);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gamma moments for shapes above and below one") {
  Rng rng(5);
  for (const double shape : {0.4, 1.0, 3.5}) {
    for (const double rate : {0.5, 2.0}) {
      const int n = 150000;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = rng.gamma(shape, rate);
        CHECK(x > 0.0);
        sum += x;
      }
      const double mean = sum / n;
      const double expect = shape / rate;
      const double se = std::sqrt(shape / (rate * rate) / n);
      CHECK(std::abs(mean - expect) < 4.0 * se);
    }
  }
  CHECK_THROWS(rng.gamma(0.0, 1.0));
  CHECK_THROWS(rng.gamma(1.0, -1.0));
}

TEST_CASE("beta moments") {
  Rng rng(6);
  const double a = 2.0, b = 5.0;
  const int n = 150000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.beta(a, b);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    sum += x;
  }
  const double mean = sum / n;
  const double expect = a / (a + b);
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
  CHECK(std::abs(mean - expect) < 4.0 * std::sqrt(var / n));
}

TEST_CASE("poisson mean and degenerate cases") {
  Rng rng(7);
  CHECK(rng.poisson(0.0) == 0);
  const double mean = 4.2;
  const int n = 150000;
  long sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.poisson(mean);
  CHECK(std::abs(static_cast<double>(sum) / n - mean) <
        4.0 * std::sqrt(mean / n));
  CHECK_THROWS(rng.poisson(-1.0));
}

TEST_CASE("categorical respects the log weights") {
  Rng rng(8);
  const std::vector<double> log_w = {std::log(0.1), std::log(0.3),
                                     std::log(0.6)};
  std::vector<long> counts(3, 0);
  const long draws = 300000;
  for (long i = 0; i < draws; ++i) {
    ++counts[rng.categorical_from_log_weights(log_w)];
  }
  CHECK(std::abs(counts[0] / static_cast<double>(draws) - 0.1) < 0.005);
  CHECK(std::abs(counts[1] / static_cast<double>(draws) - 0.3) < 0.005);
  CHECK(std::abs(counts[2] / static_cast<double>(draws) - 0.6) < 0.005);
}

TEST_CASE("categorical is invariant to a shared log-weight shift") {
  // Normalization removes any constant, so the consumed uniform maps to the
  // same index draw for draw.
  std::vector<double> base = {-1.0, 0.5, -0.3, 2.0};
  std::vector<double> shifted = base;
  for (auto& w : shifted) w += 123.456;
  Rng a(9), b(9);
  for (int i = 0; i < 2000; ++i) {
    CHECK(a.categorical_from_log_weights(base) ==
          b.categorical_from_log_weights(shifted));
  }
}

TEST_CASE("categorical rejects degenerate weight vectors") {
  Rng rng(10);
  CHECK_THROWS(rng.categorical_from_log_weights(std::vector<double>{}));
  const std::vector<double> all_zero = {
      -std::numeric_limits<double>::infinity(),
      -std::numeric_limits<double>::infinity()};
  CHECK_THROWS(rng.categorical_from_log_weights(all_zero));
}

TEST_CASE("log_sum_exp basics") {
  const std::vector<double> w = {std::log(1.0), std::log(2.0), std::log(3.0)};
  CHECK(srtmix::log_sum_exp(w) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  CHECK(srtmix::log_add_exp(std::log(2.0), std::log(5.0)) ==
        doctest::Approx(std::log(7.0)).epsilon(1e-14));
  // Stability far from zero.
  const std::vector<double> big = {1000.0, 1000.0};
  CHECK(srtmix::log_sum_exp(big) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("poisson_log_pmf matches direct evaluation") {
  CHECK(srtmix::poisson_log_pmf(2, 1.0) ==
        doctest::Approx(-1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(srtmix::poisson_log_pmf(0, 0.0) == 0.0);
  CHECK(srtmix::poisson_log_pmf(1, 0.0) ==
        -std::numeric_limits<double>::infinity());
}
