#include "srtmix/mfm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "srtmix/math.hpp"

namespace srtmix {

void MfmConfig::validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw std::invalid_argument("MfmConfig: alpha0 must be positive");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("MfmConfig: lambda must be positive");
  }
  if (d < 0.0 || !std::isfinite(d)) {
    throw std::invalid_argument("MfmConfig: d must be >= 0");
  }
}

VnTable VnTable::compute(int n, const MfmConfig& config, int t_max,
                         double rel_tol) {
  config.validate();
  if (n < 1) throw std::invalid_argument("VnTable: n must be >= 1");
  if (t_max < 1) throw std::invalid_argument("VnTable: t_max must be >= 1");
  if (t_max > n) {
    // More occupied clusters than spots cannot occur.
    throw std::invalid_argument("VnTable: t_max = " + std::to_string(t_max) +
                                " exceeds n = " + std::to_string(n));
  }
  if (!(rel_tol > 0.0) || rel_tol >= 1.0) {
    throw std::invalid_argument("VnTable: rel_tol must be in (0, 1)");
  }

  VnTable table;
  table.n_ = n;
  table.config_ = config;
  table.rel_tol_ = rel_tol;
  table.log_v_.resize(t_max);

  const double log_lambda = std::log(config.lambda);
  const double log_rel_tol = std::log(rel_tol);
  const int k_cap = std::max(1000, 10 * n);

  for (int t = 1; t <= t_max; ++t) {
    double log_sum = -std::numeric_limits<double>::infinity();
    int consecutive_small = 0;
    for (int k = t; k <= k_cap; ++k) {
      // K!/(K-t)! * Gamma(K a0)/Gamma(n + K a0) * Poisson(K - 1 | lambda)
      const double log_term =
          std::lgamma(k + 1.0) - std::lgamma(k - t + 1.0) +
          std::lgamma(k * config.alpha0) -
          std::lgamma(n + k * config.alpha0) +
          (k - 1.0) * log_lambda - config.lambda - std::lgamma(k + 0.0);
      const bool small =
          std::isfinite(log_sum) && (log_term - log_sum < log_rel_tol);
      log_sum = log_add_exp(log_sum, log_term);
      consecutive_small = small ? consecutive_small + 1 : 0;
      if (consecutive_small >= 30) break;
    }
    table.log_v_[t - 1] = log_sum;
  }
  return table;
}

double VnTable::log_vn(int t) const {
  if (t < 1 || t > static_cast<int>(log_v_.size())) {
    throw std::out_of_range("VnTable::log_vn: t = " + std::to_string(t) +
                            " outside [1, " + std::to_string(log_v_.size()) +
                            "]");
  }
  return log_v_[t - 1];
}

VnTable VnTable::extended(int new_t_max) const {
  if (new_t_max <= t_max()) return *this;
  return compute(n_, config_, new_t_max, rel_tol_);
}

double urn_existing_log_weight(long cluster_size, int neighbor_count,
                               const MfmConfig& config) {
  if (cluster_size < 0 || neighbor_count < 0) {
    throw std::invalid_argument("urn_existing_log_weight: negative counts");
  }
  return std::log(static_cast<double>(cluster_size) + config.alpha0) +
         config.d * static_cast<double>(neighbor_count);
}

double urn_new_log_weight(int t, const VnTable& vn, const MfmConfig& config) {
  if (t < 1) throw std::invalid_argument("urn_new_log_weight: t must be >= 1");
  return std::log(config.alpha0) + vn.log_vn(t + 1) - vn.log_vn(t);
}

double partition_log_prior(const Eigen::VectorXi& z, const SpatialGraph& graph,
                           const VnTable& vn, const MfmConfig& config) {
  const Eigen::Index n = z.size();
  if (n == 0) throw std::invalid_argument("partition_log_prior: empty labels");
  if (graph.n() != n) {
    throw std::invalid_argument("partition_log_prior: graph covers " +
                                std::to_string(graph.n()) + " spots, labels " +
                                std::to_string(n));
  }
  if (vn.n() != n) {
    throw std::invalid_argument("partition_log_prior: coefficient table is "
                                "for n = " + std::to_string(vn.n()));
  }

  int t = 0;
  for (Eigen::Index i = 0; i < n; ++i) t = std::max(t, z[i]);
  std::vector<long> cluster_sizes(t, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z[i] < 1 || z[i] > t) {
      throw std::invalid_argument("partition_log_prior: label out of range at "
                                  "spot " + std::to_string(i));
    }
    ++cluster_sizes[z[i] - 1];
  }
  for (int k = 0; k < t; ++k) {
    if (cluster_sizes[k] == 0) {
      throw std::invalid_argument("partition_log_prior: empty label " +
                                  std::to_string(k + 1));
    }
  }

  double log_prior = vn.log_vn(t);
  for (int k = 0; k < t; ++k) {
    log_prior += std::lgamma(config.alpha0 + cluster_sizes[k]) -
                 std::lgamma(config.alpha0);
  }

  long matched_edges = 0;
  for (int i = 0; i < n; ++i) {
    for (const int j : graph.neighbors[i]) {
      if (j > i && z[i] == z[j]) ++matched_edges;
    }
  }
  log_prior += config.d * static_cast<double>(matched_edges);
  return log_prior;
}

}  // namespace srtmix
