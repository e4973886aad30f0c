#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "srtmix/data.hpp"
#include "srtmix/io.hpp"
#include "srtmix/rng.hpp"
#include "srtmix/sampler.hpp"

namespace srtmix {

// Synthetic-data scenario on a rectangular lattice.
struct SimScenario {
  int height = 40;
  int width = 40;
  int k = 3;                 // number of spatial domains: 3, 5, or 7
  double potts_beta = 1.0;   // spatial smoothness of the true labels
  int potts_sweeps = 500;
  int p = 1000;              // genes
  int p_gamma = 20;          // leading discriminating genes (must be even)
  double pi = 0.1;           // dropout probability, in [0, 1)
  std::uint64_t seed = 0;

  void validate() const;
};

// Ground truth and observed data for one synthetic replicate.
struct SimDataset {
  CountMatrix counts;
  Coordinates coords;
  Eigen::VectorXi z_true;
  std::vector<std::uint8_t> gamma_true;
  Eigen::MatrixXd mu_star_true;   // k x p; NaN outside the discriminating set
  Eigen::VectorXd mu0_true;       // p
  Eigen::VectorXd s_true;         // n
  BinaryMat r_true;               // n x p
};

// Gibbs-sampled Potts labels on a height x width 4-neighbor lattice
// (raster-scan single-site updates from a uniform start).  Returns row-major
// labels 1..k.
Eigen::VectorXi sample_potts(int height, int width, int k, double beta,
                             int sweeps, Rng& rng);

struct MuScheme {
  Eigen::MatrixXd mu_star;            // k x p (NaN outside selected genes)
  Eigen::VectorXd mu0;                // p
  std::vector<std::uint8_t> gamma_true;
};

// Structured expression levels over the first p_gamma genes S:
//   domain 1: Gamma(2, 1) draws on S;    domain 2: domain 1 + 3 on S;
//   domain 3: domain 1 + 6 on S;
//   k >= 5:   a random half S4 of S gets +3 over domain 1 (domain 4), the
//             complement S \ S4 gets +3 (domain 5);
//   k = 7:    domain 6 = domain 1 + 9 on S, domain 7 boosts a fresh random
//             half of S by +9.
// Background levels mu0 ~ Gamma(2, 1) everywhere.  k must be 3, 5, or 7 and
// p_gamma even.
MuScheme generate_mu(int k, int p, int p_gamma, Rng& rng);

// Zero-inflated Poisson observations: s_i ~ Uniform(0.5, 1.5), per-entry
// dropout r ~ Bernoulli(pi), and y = 0 on dropouts else Poisson(s_i * level)
// with the level picked by the true labels/indicators.  Entries are drawn in
// row-major order.  pi = 1 gives an all-zero matrix.
SimDataset generate_counts(const Eigen::VectorXi& z_true,
                           const Eigen::MatrixXd& mu_star,
                           const Eigen::VectorXd& mu0,
                           const std::vector<std::uint8_t>& gamma_true,
                           double pi, Rng& rng);

// Full pipeline for a lattice scenario: Potts labels, expression scheme,
// counts, unit-spaced lattice coordinates (x = column, y = row), and ids.
SimDataset generate_dataset(const SimScenario& scenario);

}  // namespace srtmix
