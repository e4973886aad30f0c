#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace srtmix {

// Deterministic random layer.
//
// std::mt19937_64 produces a bit-identical stream on every conforming
// implementation, but the standard *distributions* do not.  All variate
// transforms below are therefore implemented by hand so that a given seed
// yields the same draws on any platform/compiler.  Every transform consumes
// a well-defined number of engine outputs per attempt, and all loops are
// rejection loops whose accept/reject decisions depend only on the drawn
// values, so the mapping seed -> output stream is fully reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Scrambles (seed, stream) into an independent-looking sub-seed.  Used to
  // give replicates / grid points / chains their own streams.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on {0, ..., n-1} via rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % un);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller without caching: every call consumes exactly two uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Marsaglia-Tsang for shape >= 1, with the standard u^(1/shape) boost for
  // shape < 1.  Parameterized by shape and *rate* (mean = shape / rate).
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      throw std::invalid_argument("gamma: shape and rate must be positive");
    }
    if (shape < 1.0) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v / rate;
      }
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
  }

  // Exact Poisson sampling by counting unit-exponential arrivals in [0, mean].
  // O(mean) but exact and underflow-free for any mean; the means seen here are
  // small (scaled expression levels), so this is never a bottleneck.
  std::int64_t poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean)) {
      throw std::invalid_argument("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) return 0;
    std::int64_t count = -1;
    double total = 0.0;
    while (total <= mean) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      total += -std::log(u);
      ++count;
    }
    return count;
  }

  // Draws an index with probability proportional to exp(log_w[k]).  Weights
  // are normalized internally via the max trick; ties and near-zero weights
  // are handled by the final-index fallback.
  std::size_t categorical_from_log_weights(std::span<const double> log_w) {
    if (log_w.empty()) {
      throw std::invalid_argument("categorical_from_log_weights: empty weights");
    }
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const double lw : log_w) max_lw = std::max(max_lw, lw);
    if (!std::isfinite(max_lw)) {
      throw std::invalid_argument(
          "categorical_from_log_weights: all weights are zero or non-finite");
    }
    double total = 0.0;
    for (const double lw : log_w) total += std::exp(lw - max_lw);
    const double u = uniform() * total;
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < log_w.size(); ++k) {
      cum += std::exp(log_w[k] - max_lw);
      if (u < cum) return k;
    }
    return log_w.size() - 1;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace srtmix
