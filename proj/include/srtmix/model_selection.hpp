#pragma once

#include <string>
#include <vector>

#include "srtmix/posterior.hpp"
#include "srtmix/sampler.hpp"

namespace srtmix {

struct PbicRecord {
  double d = 0.0;
  double pbic = 0.0;
  double loglik = 0.0;   // plug-in log likelihood at the posterior estimates
  int k_hat = 0;
  int p_gamma_hat = 0;
  bool failed = false;
  std::string error;
};

// Penalized BIC of a fitted interaction strength d:
//
//   -2 log L(Y | mu_hat, r_hat, z_hat, gamma_hat)
//   + log(n) * (p_gamma_hat * k_hat + (p - p_gamma_hat)),
//
// where the plug-in likelihood skips entries estimated as dropouts and the
// penalty counts the free expression levels (one per cluster for selected
// genes, one shared otherwise).
PbicRecord compute_pbic(const CountMatrix& counts, const Eigen::VectorXd& s,
                        const PosteriorSummary& summary, const BinaryMat& r_hat,
                        double d);

struct DSelection {
  double best_d = 0.0;
  std::vector<PbicRecord> records;  // grid order
};

// Fits one chain per grid value of d (seed derived per grid index), summarizes
// each, and picks the d minimizing pBIC (earliest on ties).  Individual grid
// failures are recorded and skipped; throws only if every grid point fails.
DSelection select_d(const CountMatrix& counts, const Eigen::VectorXd& s,
                    const SpatialGraph& graph, const Hyperparams& hp,
                    const MfmConfig& base_config, const McmcConfig& mcmc,
                    const std::vector<double>& d_grid, int threads = 1,
                    DgSelection dg_method = DgSelection::Median,
                    double bfdr_level = 0.05);

std::vector<double> default_d_grid();  // {0, 0.5, 1, 1.5, 2, 2.5, 3}

}  // namespace srtmix
