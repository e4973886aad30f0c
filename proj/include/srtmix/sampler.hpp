#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "srtmix/data.hpp"
#include "srtmix/mfm.hpp"
#include "srtmix/rng.hpp"
#include "srtmix/spatial.hpp"

namespace srtmix {

using BinaryMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Conjugate hyperparameters.  Expression levels are Gamma(alpha_mu, beta_mu)
// a priori (shape/rate), per-spot dropout probabilities Beta(alpha_pi,
// beta_pi), and the discriminating-gene indicator prior is Bernoulli with a
// Beta(alpha_omega, beta_omega) mean integrated out.
struct Hyperparams {
  double alpha_mu = 1.0;
  double beta_mu = 1.0;
  double alpha_pi = 1.0;
  double beta_pi = 1.0;
  double alpha_omega = 0.1;
  double beta_omega = 1.9;
  // Probability that a gene-indicator proposal is an Add/Delete flip rather
  // than a Swap of an included/excluded pair.
  double move_prob_rho = 0.5;

  // Throws on non-positive values; warns (stderr) when alpha_omega +
  // beta_omega != 2, since the conventional sparsity calibration keeps the
  // pseudo-count total at 2.
  void validate() const;
};

struct McmcConfig {
  long iterations = 10000;
  long burn_in = 5000;
  long thin = 1;
  std::uint64_t seed = 0;
  // Record per-entry dropout inclusion means (needed for pBIC evaluation).
  bool record_r = true;
  // Number of clusters used for the uniform initial assignment.
  int k_init = 5;
  // Gene-indicator Metropolis proposals per sweep; 0 selects ceil(p / 10).
  int gamma_moves_per_sweep = 0;

  void validate() const;
};

// Full parameter state of one MCMC iteration.
struct ModelState {
  Eigen::VectorXi z;                 // n, cluster labels 1..K (contiguous)
  std::vector<std::uint8_t> gamma;   // p, discriminating-gene indicators
  BinaryMat r;                       // n x p, dropout indicators (0 where y>0)
  Eigen::MatrixXd mu_star;           // K x p, cluster expression levels
  Eigen::VectorXd mu0;               // p, shared background levels
  Eigen::VectorXd pi;                // n, per-spot dropout probabilities

  int num_clusters() const { return static_cast<int>(mu_star.rows()); }

  // Throws std::logic_error when labels are non-contiguous, shapes disagree,
  // r is set where y > 0, or parameters leave their support.
  void check_invariants(const Eigen::MatrixXi& y) const;
};

// Recorded chain output.  Traces cover every iteration; samples are the
// post-burn-in states kept at the thinning interval.
struct ChainTrace {
  long n = 0;
  long p = 0;

  std::vector<double> loglik_trace;  // per iteration
  std::vector<int> k_trace;          // per iteration

  std::vector<long> sample_iterations;              // 1-based iteration index
  std::vector<Eigen::VectorXi> z_samples;
  std::vector<std::vector<std::uint8_t>> gamma_samples;
  std::vector<Eigen::MatrixXd> mu_star_samples;     // K_u x p each
  Eigen::VectorXd mu0_sum;                          // running sum over samples
  Eigen::MatrixXd r_sum;                            // n x p, if recorded
  bool has_r = false;

  // Joint score pieces per sample, for MAP extraction: data log likelihood,
  // clustering log prior, and (unnormalized) gene-indicator log prior.
  std::vector<double> sample_loglik;
  std::vector<double> sample_log_prior_z;
  std::vector<double> sample_log_prior_gamma;

  long num_samples() const { return static_cast<long>(z_samples.size()); }
};

// Collapsed marginal log likelihood of one gene's counts within one cluster,
// integrating the Gamma(alpha, beta) level against the Poisson likelihoods
// with offsets ss:
//
//   sum_i [y_i log s_i - log y_i!] + alpha log beta - lgamma(alpha)
//   + lgamma(alpha + sum y) - (alpha + sum y) log(beta + sum s).
//
// An empty cell contributes 0.
double gene_cluster_marginal_loglik(std::span<const int> ys,
                                    std::span<const double> ss, double alpha,
                                    double beta);

// Same quantity from sufficient statistics; const_part carries
// sum_i [y_i log s_i - lgamma(y_i + 1)] over the cell's entries.
double gene_cluster_marginal_from_stats(double sum_y, double sum_s,
                                        double const_part, double alpha,
                                        double beta, long count);

// Collapsed marginal log likelihood of gene j across the whole sample under a
// hypothetical indicator value: per-cluster cells when as_dg, one pooled cell
// otherwise.  Only entries with r_ij = 0 enter (dropouts carry no expression
// information).
double gene_column_marginal_loglik(const ModelState& state,
                                   const Eigen::MatrixXi& y,
                                   const Eigen::VectorXd& s, int j, bool as_dg,
                                   const Hyperparams& hp);

// Success probability for re-drawing a dropout indicator at an observed zero:
// pi / (pi + (1 - pi) * exp(-s * mu)).
double dropout_conditional_probability(double pi, double s, double mu);

// One Metropolis proposal on the gene indicators (Add/Delete or Swap),
// accepted against the collapsed marginal times the Beta-Bernoulli prior.
// Returns true when the proposal was accepted.
bool update_gamma(ModelState& state, const Eigen::MatrixXi& y,
                  const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng);

// Conditional assignment weights for spot i with the spot detached from the
// current clustering: one entry per existing cluster (order of labels 1..t)
// plus a final entry for opening a new cluster.  Pure function of the
// detached state; exposed to make the transition kernel directly testable.
// The state passed in must have spot i detached (z[i] == 0).
std::vector<double> z_assignment_log_weights(const ModelState& detached,
                                             const Eigen::MatrixXi& y,
                                             const Eigen::VectorXd& s,
                                             const SpatialGraph& graph,
                                             const VnTable& vn,
                                             const MfmConfig& config,
                                             const Hyperparams& hp, int i);

// One full sweep of cluster reassignments (spots in index order).  Each spot
// is detached, reassigned by the urn-and-likelihood weights above, and on a
// birth the new cluster's expression row is drawn from its single-spot
// conjugate posterior.  The table is extended on demand when the number of
// clusters approaches its cap.
void update_z(ModelState& state, const Eigen::MatrixXi& y,
              const Eigen::VectorXd& s, const SpatialGraph& graph, VnTable& vn,
              const MfmConfig& config, const Hyperparams& hp, Rng& rng);

// Conjugate Gamma refresh of every cluster/gene level and every background
// level.  All cells are refreshed each sweep, in a fixed order (background
// first, then clusters in label order, genes inner), so indicator flips never
// interact with stale levels.
void update_mu(ModelState& state, const Eigen::MatrixXi& y,
               const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng);

// Re-draws dropout indicators at observed zeros from their Bernoulli
// conditionals; entries with y > 0 stay 0.
void update_r(ModelState& state, const Eigen::MatrixXi& y,
              const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng);

// Beta conjugate refresh of the per-spot dropout probabilities.
void update_pi(ModelState& state, const Hyperparams& hp, Rng& rng);

// Joint log likelihood of the counts under the current state: dropout point
// mass at zero where r_ij = 1, Poisson(s_i * level) otherwise.
double data_log_likelihood(const ModelState& state, const Eigen::MatrixXi& y,
                           const Eigen::VectorXd& s);

// Optional per-iteration observer (tests use it to tally states).
using SweepObserver =
    std::function<void(long iteration, const ModelState& state)>;

// Runs the full chain: initialization from the priors, then per iteration the
// gene-indicator proposals, the clustering sweep, the level/dropout/dropout-
// probability refreshes, and trace recording.
ChainTrace run_chain(const CountMatrix& counts, const Eigen::VectorXd& s,
                     const SpatialGraph& graph, const Hyperparams& hp,
                     const MfmConfig& config, const McmcConfig& mcmc,
                     const SweepObserver& observer = nullptr);

namespace detail {

// Removes spot i from its cluster (z[i] becomes 0).  When the cluster
// empties, its expression row is deleted and higher labels shift down.
void detach_spot(ModelState& state, int i);

// Assigns detached spot i to label (1-based); label == t + 1 opens a new
// cluster whose expression row is drawn from the single-spot conjugate
// posterior (all p genes, in gene order).
void attach_spot(ModelState& state, const Eigen::MatrixXi& y,
                 const Eigen::VectorXd& s, const Hyperparams& hp, int i,
                 int label, Rng& rng);

}  // namespace detail

}  // namespace srtmix
