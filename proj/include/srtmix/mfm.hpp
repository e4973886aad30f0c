#pragma once

#include <Eigen/Core>
#include <vector>

#include "srtmix/spatial.hpp"

namespace srtmix {

// Prior configuration for the spatially coupled mixture-of-finite-mixtures:
// number of components K - 1 ~ Poisson(lambda), symmetric Dirichlet(alpha0)
// weights, and an interaction strength d >= 0 rewarding neighboring spots
// that share a cluster.
struct MfmConfig {
  double alpha0 = 1.0;
  double lambda = 1.0;
  double d = 0.0;

  void validate() const;  // throws std::invalid_argument
};

// Precomputed log V_n(t) coefficients for a fixed sample size n:
//
//   V_n(t) = sum_{K>=t} K!/(K-t)! * Gamma(K alpha0) / Gamma(n + K alpha0)
//            * P(K - 1 | lambda),
//
// accumulated in log space.  The series converges quickly; summation stops
// once 30 consecutive terms each contribute less than rel_tol of the running
// sum (with a hard cap on K to guarantee termination).
class VnTable {
 public:
  VnTable() = default;

  static VnTable compute(int n, const MfmConfig& config, int t_max,
                         double rel_tol = 1e-12);

  double log_vn(int t) const;  // t in [1, t_max]; throws out_of_range
  int n() const { return n_; }
  int t_max() const { return static_cast<int>(log_v_.size()); }

  // Returns a table covering at least new_t_max (recomputes when needed).
  VnTable extended(int new_t_max) const;

 private:
  int n_ = 0;
  MfmConfig config_{};
  double rel_tol_ = 1e-12;
  std::vector<double> log_v_;  // log_v_[t-1] = log V_n(t)
};

// Log weight for reassigning a spot to existing cluster k in the urn
// scheme induced by the prior: (n_k + alpha0) * exp(d * m_k), where n_k
// counts the cluster's current members (the spot itself removed) and m_k its
// graph neighbors currently in k.
double urn_existing_log_weight(long cluster_size, int neighbor_count,
                               const MfmConfig& config);

// Log weight for opening a new cluster when t clusters currently exist
// (after removal): alpha0 * V_n(t+1) / V_n(t).  Spatially blind: the new
// cluster has no members for neighbors to match.
double urn_new_log_weight(int t, const VnTable& vn, const MfmConfig& config);

// Log prior mass of a full clustering z (labels 1..t, all labels occupied):
//
//   log V_n(t) + sum_k [lgamma(alpha0 + n_k) - lgamma(alpha0)] + d * E(z),
//
// where E(z) counts unordered neighbor pairs sharing a label.  At d = 0 this
// is a proper distribution over set partitions of the n spots.
double partition_log_prior(const Eigen::VectorXi& z, const SpatialGraph& graph,
                           const VnTable& vn, const MfmConfig& config);

}  // namespace srtmix
