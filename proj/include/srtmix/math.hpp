#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace srtmix {

inline double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;  // all -inf (or empty treated upstream)
  double s = 0.0;
  for (const double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log P(Y = y) for Y ~ Poisson(mean); mean = 0 is the point mass at zero.
inline double poisson_log_pmf(std::int64_t y, double mean) {
  if (mean == 0.0) {
    return y == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(y) * std::log(mean) - mean -
         std::lgamma(static_cast<double>(y) + 1.0);
}

inline double log_binomial_coefficient(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Number of unordered pairs among m items, exact in double for m < 2^26.
inline double choose2(double m) { return 0.5 * m * (m - 1.0); }

}  // namespace srtmix
