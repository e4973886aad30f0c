#include "srtmix/sampler.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

#include "srtmix/math.hpp"

namespace srtmix {

void Hyperparams::validate() const {
  const double values[] = {alpha_mu, beta_mu, alpha_pi,
                           beta_pi,  alpha_omega, beta_omega};
  for (const double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("Hyperparams: all shape/rate values must be "
                                  "positive and finite");
    }
  }
  if (!(move_prob_rho >= 0.0 && move_prob_rho <= 1.0)) {
    throw std::invalid_argument("Hyperparams: move_prob_rho must be in [0, 1]");
  }
  if (std::abs(alpha_omega + beta_omega - 2.0) > 1e-12) {
    std::cerr << "warning: alpha_omega + beta_omega = "
              << (alpha_omega + beta_omega)
              << " departs from the conventional total of 2\n";
  }
}

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("McmcConfig: iterations < 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("McmcConfig: burn_in must be in [0, iterations)");
  }
  if (thin < 1) throw std::invalid_argument("McmcConfig: thin < 1");
  if (k_init < 1) throw std::invalid_argument("McmcConfig: k_init < 1");
  if (gamma_moves_per_sweep < 0) {
    throw std::invalid_argument("McmcConfig: gamma_moves_per_sweep < 0");
  }
}

void ModelState::check_invariants(const Eigen::MatrixXi& y) const {
  const Eigen::Index n = z.size();
  const Eigen::Index p = mu0.size();
  const int t = num_clusters();
  auto bad = [](const std::string& m) { throw std::logic_error("ModelState: " + m); };

  if (y.rows() != n || y.cols() != p) bad("count matrix shape mismatch");
  if (static_cast<Eigen::Index>(gamma.size()) != p) bad("gamma size mismatch");
  if (r.rows() != n || r.cols() != p) bad("r shape mismatch");
  if (mu_star.cols() != p) bad("mu_star column mismatch");
  if (pi.size() != n) bad("pi size mismatch");

  std::vector<long> sizes(t, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z[i] < 1 || z[i] > t) bad("label out of range at spot " + std::to_string(i));
    ++sizes[z[i] - 1];
  }
  for (int k = 0; k < t; ++k) {
    if (sizes[k] == 0) bad("empty cluster label " + std::to_string(k + 1));
  }
  for (const auto g : gamma) {
    if (g > 1) bad("gamma entries must be 0/1");
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (r(i, j) > 1) bad("r entries must be 0/1");
      if (r(i, j) == 1 && y(i, j) > 0) bad("dropout marked at a positive count");
    }
  }
  if (!(mu_star.array() > 0.0).all() || !mu_star.allFinite()) {
    bad("mu_star must be positive and finite");
  }
  if (!(mu0.array() > 0.0).all() || !mu0.allFinite()) {
    bad("mu0 must be positive and finite");
  }
  if (!(pi.array() >= 0.0).all() || !(pi.array() <= 1.0).all()) {
    bad("pi must lie in [0, 1]");
  }
}

double gene_cluster_marginal_from_stats(double sum_y, double sum_s,
                                        double const_part, double alpha,
                                        double beta, long count) {
  if (count == 0) return 0.0;
  return const_part + alpha * std::log(beta) - std::lgamma(alpha) +
         std::lgamma(alpha + sum_y) -
         (alpha + sum_y) * std::log(beta + sum_s);
}

double gene_cluster_marginal_loglik(std::span<const int> ys,
                                    std::span<const double> ss, double alpha,
                                    double beta) {
  if (ys.size() != ss.size()) {
    throw std::invalid_argument(
        "gene_cluster_marginal_loglik: ys and ss lengths differ");
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "gene_cluster_marginal_loglik: alpha and beta must be positive");
  }
  double sum_y = 0.0;
  double sum_s = 0.0;
  double const_part = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] < 0) {
      throw std::invalid_argument("gene_cluster_marginal_loglik: negative count");
    }
    if (!(ss[i] > 0.0)) {
      throw std::invalid_argument(
          "gene_cluster_marginal_loglik: offsets must be positive");
    }
    sum_y += ys[i];
    sum_s += ss[i];
    const_part += ys[i] * std::log(ss[i]) - std::lgamma(ys[i] + 1.0);
  }
  return gene_cluster_marginal_from_stats(sum_y, sum_s, const_part, alpha, beta,
                                          static_cast<long>(ys.size()));
}

double gene_column_marginal_loglik(const ModelState& state,
                                   const Eigen::MatrixXi& y,
                                   const Eigen::VectorXd& s, int j, bool as_dg,
                                   const Hyperparams& hp) {
  const Eigen::Index n = y.rows();
  const int t = state.num_clusters();
  const int cells = as_dg ? t : 1;
  std::vector<double> sum_y(cells, 0.0), sum_s(cells, 0.0), cpart(cells, 0.0);
  std::vector<long> counts(cells, 0);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (state.r(i, j) != 0) continue;  // dropouts carry no expression signal
    const int cell = as_dg ? state.z[i] - 1 : 0;
    const int yy = y(i, j);
    sum_y[cell] += yy;
    sum_s[cell] += s[i];
    cpart[cell] += yy * std::log(s[i]) - std::lgamma(yy + 1.0);
    ++counts[cell];
  }

  double total = 0.0;
  for (int c = 0; c < cells; ++c) {
    total += gene_cluster_marginal_from_stats(sum_y[c], sum_s[c], cpart[c],
                                              hp.alpha_mu, hp.beta_mu, counts[c]);
  }
  return total;
}

double dropout_conditional_probability(double pi, double s, double mu) {
  const double denom = pi + (1.0 - pi) * std::exp(-s * mu);
  return denom > 0.0 ? pi / denom : 0.0;
}

bool update_gamma(ModelState& state, const Eigen::MatrixXi& y,
                  const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng) {
  const int p = static_cast<int>(state.gamma.size());
  int p_gamma = 0;
  for (const auto g : state.gamma) p_gamma += g;

  // Unnormalized Beta-Bernoulli prior over the selection size.
  const auto prior_term = [&](int m) {
    return std::lgamma(hp.alpha_omega + m) + std::lgamma(hp.beta_omega + p - m);
  };

  double log_ratio = 0.0;
  int flip_a = -1;  // gene(s) to toggle on acceptance
  int flip_b = -1;

  if (rng.uniform() < hp.move_prob_rho) {
    // Add/Delete: flip one uniformly chosen indicator.
    const int j = static_cast<int>(rng.uniform_int(p));
    const bool currently_in = state.gamma[j] != 0;
    log_ratio = gene_column_marginal_loglik(state, y, s, j, !currently_in, hp) -
                gene_column_marginal_loglik(state, y, s, j, currently_in, hp) +
                prior_term(p_gamma + (currently_in ? -1 : 1)) -
                prior_term(p_gamma);
    flip_a = j;
  } else {
    // Swap one included against one excluded gene; impossible at the
    // boundary selections, which leaves the state unchanged.
    if (p_gamma == 0 || p_gamma == p) return false;
    int in_pick = static_cast<int>(rng.uniform_int(p_gamma));
    int out_pick = static_cast<int>(rng.uniform_int(p - p_gamma));
    int j_in = -1, j_out = -1;
    for (int j = 0; j < p; ++j) {
      if (state.gamma[j] != 0) {
        if (in_pick-- == 0) j_in = j;
      } else {
        if (out_pick-- == 0) j_out = j;
      }
    }
    log_ratio =
        gene_column_marginal_loglik(state, y, s, j_in, false, hp) +
        gene_column_marginal_loglik(state, y, s, j_out, true, hp) -
        gene_column_marginal_loglik(state, y, s, j_in, true, hp) -
        gene_column_marginal_loglik(state, y, s, j_out, false, hp);
    flip_a = j_in;
    flip_b = j_out;
  }

  if (std::log(rng.uniform()) < log_ratio) {
    state.gamma[flip_a] ^= 1;
    if (flip_b >= 0) state.gamma[flip_b] ^= 1;
    return true;
  }
  return false;
}

namespace detail {

void detach_spot(ModelState& state, int i) {
  const int c = state.z[i];
  state.z[i] = 0;
  for (Eigen::Index m = 0; m < state.z.size(); ++m) {
    if (state.z[m] == c) return;  // cluster still occupied
  }
  // Spot was a singleton: delete the cluster's level row and close the gap.
  const int t = state.num_clusters();
  Eigen::MatrixXd reduced(t - 1, state.mu_star.cols());
  reduced.topRows(c - 1) = state.mu_star.topRows(c - 1);
  reduced.bottomRows(t - c) = state.mu_star.bottomRows(t - c);
  state.mu_star = std::move(reduced);
  for (Eigen::Index m = 0; m < state.z.size(); ++m) {
    if (state.z[m] > c) --state.z[m];
  }
}

void attach_spot(ModelState& state, const Eigen::MatrixXi& y,
                 const Eigen::VectorXd& s, const Hyperparams& hp, int i,
                 int label, Rng& rng) {
  const int t = state.num_clusters();
  if (label < 1 || label > t + 1) {
    throw std::logic_error("attach_spot: label out of range");
  }
  if (label == t + 1) {
    const Eigen::Index p = state.mu0.size();
    state.mu_star.conservativeResize(t + 1, p);
    // Conditional on the newborn cluster {i}: its selected genes see spot i's
    // observation (unless dropped out), everything else is prior-fresh.
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool informative = state.gamma[j] != 0 && state.r(i, j) == 0;
      const double shape = hp.alpha_mu + (informative ? y(i, j) : 0);
      const double rate = hp.beta_mu + (informative ? s[i] : 0.0);
      state.mu_star(t, j) = rng.gamma(shape, rate);
    }
  }
  state.z[i] = label;
}

}  // namespace detail

std::vector<double> z_assignment_log_weights(const ModelState& detached,
                                             const Eigen::MatrixXi& y,
                                             const Eigen::VectorXd& s,
                                             const SpatialGraph& graph,
                                             const VnTable& vn,
                                             const MfmConfig& config,
                                             const Hyperparams& hp, int i) {
  if (detached.z[i] != 0) {
    throw std::logic_error("z_assignment_log_weights: spot is still attached");
  }
  const int t = detached.num_clusters();
  const Eigen::Index n = detached.z.size();

  std::vector<long> sizes(t, 0);
  for (Eigen::Index m = 0; m < n; ++m) {
    if (detached.z[m] > 0) ++sizes[detached.z[m] - 1];
  }
  std::vector<int> matched(t, 0);
  for (const int nb : graph.neighbors[i]) {
    if (detached.z[nb] > 0) ++matched[detached.z[nb] - 1];
  }

  // Genes whose levels depend on the assignment; everything else contributes
  // the same factor to every choice and is kept out by symmetry.  Dropout
  // entries are likelihood-flat too.
  std::vector<int> genes;
  for (Eigen::Index j = 0; j < detached.mu0.size(); ++j) {
    if (detached.gamma[j] != 0 && detached.r(i, j) == 0) {
      genes.push_back(static_cast<int>(j));
    }
  }

  std::vector<double> log_w(t + 1);
  for (int k = 0; k < t; ++k) {
    double lw = urn_existing_log_weight(sizes[k], matched[k], config);
    for (const int j : genes) {
      lw += poisson_log_pmf(y(i, j), s[i] * detached.mu_star(k, j));
    }
    log_w[k] = lw;
  }

  double lw_new = urn_new_log_weight(t, vn, config);
  for (const int j : genes) {
    const int one_y[] = {y(i, j)};
    const double one_s[] = {s[i]};
    lw_new += gene_cluster_marginal_loglik(one_y, one_s, hp.alpha_mu, hp.beta_mu);
  }
  log_w[t] = lw_new;
  return log_w;
}

void update_z(ModelState& state, const Eigen::MatrixXi& y,
              const Eigen::VectorXd& s, const SpatialGraph& graph, VnTable& vn,
              const MfmConfig& config, const Hyperparams& hp, Rng& rng) {
  const Eigen::Index n = state.z.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    detail::detach_spot(state, static_cast<int>(i));
    const int t = state.num_clusters();
    if (t + 1 > vn.t_max()) {
      vn = vn.extended(std::min<int>(vn.n(), std::max(t + 1, 2 * vn.t_max())));
    }
    const auto log_w = z_assignment_log_weights(state, y, s, graph, vn, config,
                                                hp, static_cast<int>(i));
    const int label = static_cast<int>(rng.categorical_from_log_weights(log_w)) + 1;
    detail::attach_spot(state, y, s, hp, static_cast<int>(i), label, rng);
  }
}

void update_mu(ModelState& state, const Eigen::MatrixXi& y,
               const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng) {
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  const int t = state.num_clusters();

  Eigen::MatrixXd sum_y = Eigen::MatrixXd::Zero(t, p);
  Eigen::MatrixXd sum_s = Eigen::MatrixXd::Zero(t, p);
  Eigen::VectorXd sum_y0 = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd sum_s0 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state.r(i, j) != 0) continue;
      const int k = state.z[i] - 1;
      sum_y(k, j) += y(i, j);
      sum_s(k, j) += s[i];
      sum_y0[j] += y(i, j);
      sum_s0[j] += s[i];
    }
  }

  // Every level is refreshed from its exact conditional each sweep: levels the
  // current indicators leave out of the likelihood have the prior as their
  // conditional, so indicator flips never meet stale values.  Background
  // first, then clusters in label order, genes inner.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (state.gamma[j] == 0) {
      state.mu0[j] = rng.gamma(hp.alpha_mu + sum_y0[j], hp.beta_mu + sum_s0[j]);
    } else {
      state.mu0[j] = rng.gamma(hp.alpha_mu, hp.beta_mu);
    }
  }
  for (int k = 0; k < t; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (state.gamma[j] != 0) {
        state.mu_star(k, j) =
            rng.gamma(hp.alpha_mu + sum_y(k, j), hp.beta_mu + sum_s(k, j));
      } else {
        state.mu_star(k, j) = rng.gamma(hp.alpha_mu, hp.beta_mu);
      }
    }
  }
}

void update_r(ModelState& state, const Eigen::MatrixXi& y,
              const Eigen::VectorXd& s, const Hyperparams& hp, Rng& rng) {
  (void)hp;
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i, j) != 0) continue;  // positive counts are never dropouts
      const double mu = state.gamma[j] != 0 ? state.mu_star(state.z[i] - 1, j)
                                            : state.mu0[j];
      const double prob = dropout_conditional_probability(state.pi[i], s[i], mu);
      state.r(i, j) = rng.bernoulli(prob) ? 1 : 0;
    }
  }
}

void update_pi(ModelState& state, const Hyperparams& hp, Rng& rng) {
  const Eigen::Index n = state.r.rows();
  const Eigen::Index p = state.r.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    long dropouts = 0;
    for (Eigen::Index j = 0; j < p; ++j) dropouts += state.r(i, j);
    state.pi[i] = rng.beta(hp.alpha_pi + dropouts, hp.beta_pi + p - dropouts);
  }
}

double data_log_likelihood(const ModelState& state, const Eigen::MatrixXi& y,
                           const Eigen::VectorXd& s) {
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  double ll = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state.r(i, j) != 0) {
        // Dropout: the observation is zero with probability one.
        if (y(i, j) != 0) {
          throw std::logic_error(
              "data_log_likelihood: dropout marked at a positive count");
        }
        continue;
      }
      const double mu = state.gamma[j] != 0 ? state.mu_star(state.z[i] - 1, j)
                                            : state.mu0[j];
      ll += poisson_log_pmf(y(i, j), s[i] * mu);
    }
  }
  return ll;
}

namespace {

// data_log_likelihood with the count-only terms precomputed; runs without
// transcendental calls in the hot loop.
double fast_log_likelihood(const ModelState& state, const Eigen::MatrixXi& y,
                           const Eigen::VectorXd& s,
                           const Eigen::MatrixXd& const_part) {
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  const Eigen::MatrixXd log_mu_star = state.mu_star.array().log();
  const Eigen::VectorXd log_mu0 = state.mu0.array().log();

  double ll = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool dg = state.gamma[j] != 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state.r(i, j) != 0) continue;
      const double mu = dg ? state.mu_star(state.z[i] - 1, j) : state.mu0[j];
      const double log_mu = dg ? log_mu_star(state.z[i] - 1, j) : log_mu0[j];
      ll += const_part(i, j) + y(i, j) * log_mu - s[i] * mu;
    }
  }
  return ll;
}

ModelState initial_state(const Eigen::MatrixXi& y, const Hyperparams& hp,
                         const McmcConfig& mcmc, Rng& rng) {
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  ModelState state;

  // Uniform assignment over k_init clusters, relabeled to contiguous labels
  // by first appearance (some initial clusters may come up empty).
  state.z.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    state.z[i] = 1 + static_cast<int>(rng.uniform_int(mcmc.k_init));
  }
  std::vector<int> relabel(mcmc.k_init + 1, 0);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (relabel[state.z[i]] == 0) relabel[state.z[i]] = ++next;
    state.z[i] = relabel[state.z[i]];
  }

  state.gamma.resize(p);
  const double inclusion = hp.alpha_omega / (hp.alpha_omega + hp.beta_omega);
  for (Eigen::Index j = 0; j < p; ++j) {
    state.gamma[j] = rng.bernoulli(inclusion) ? 1 : 0;
  }

  state.r = BinaryMat::Zero(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (y(i, j) == 0) state.r(i, j) = rng.bernoulli(0.5) ? 1 : 0;
    }
  }

  state.mu_star.resize(next, p);
  for (int k = 0; k < next; ++k) {
    for (Eigen::Index j = 0; j < p; ++j) {
      state.mu_star(k, j) = rng.gamma(hp.alpha_mu, hp.beta_mu);
    }
  }
  state.mu0.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    state.mu0[j] = rng.gamma(hp.alpha_mu, hp.beta_mu);
  }

  state.pi = Eigen::VectorXd::Constant(n, 0.5);
  return state;
}

}  // namespace

ChainTrace run_chain(const CountMatrix& counts, const Eigen::VectorXd& s,
                     const SpatialGraph& graph, const Hyperparams& hp,
                     const MfmConfig& config, const McmcConfig& mcmc,
                     const SweepObserver& observer) {
  counts.validate();
  hp.validate();
  config.validate();
  mcmc.validate();
  const Eigen::Index n = counts.n();
  const Eigen::Index p = counts.p();
  if (n < 2) throw std::invalid_argument("run_chain: need at least two spots");
  if (s.size() != n) {
    throw std::invalid_argument("run_chain: size factors cover " +
                                std::to_string(s.size()) + " spots, counts " +
                                std::to_string(n));
  }
  if (!(s.array() > 0.0).all()) {
    throw std::invalid_argument("run_chain: size factors must be positive");
  }
  if (graph.n() != n) {
    throw std::invalid_argument("run_chain: graph covers " +
                                std::to_string(graph.n()) + " spots, counts " +
                                std::to_string(n));
  }

  const Eigen::MatrixXi& y = counts.values;
  Rng rng(mcmc.seed);
  ModelState state = initial_state(y, hp, mcmc, rng);

  VnTable vn = VnTable::compute(
      static_cast<int>(n), config,
      std::min<int>(static_cast<int>(n), std::max(10, mcmc.k_init + 2)));

  Eigen::MatrixXd const_part(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const_part(i, j) =
          y(i, j) * std::log(s[i]) - std::lgamma(y(i, j) + 1.0);
    }
  }

  const int gamma_moves = mcmc.gamma_moves_per_sweep > 0
                              ? mcmc.gamma_moves_per_sweep
                              : std::max<int>(1, static_cast<int>((p + 9) / 10));

  ChainTrace trace;
  trace.n = n;
  trace.p = p;
  trace.mu0_sum = Eigen::VectorXd::Zero(p);
  trace.has_r = mcmc.record_r;
  if (mcmc.record_r) trace.r_sum = Eigen::MatrixXd::Zero(n, p);

  const auto prior_term = [&](int m) {
    return std::lgamma(hp.alpha_omega + m) +
           std::lgamma(hp.beta_omega + static_cast<double>(p) - m);
  };

  for (long iter = 1; iter <= mcmc.iterations; ++iter) {
    for (int m = 0; m < gamma_moves; ++m) update_gamma(state, y, s, hp, rng);
    update_z(state, y, s, graph, vn, config, hp, rng);
    update_mu(state, y, s, hp, rng);
    update_r(state, y, s, hp, rng);
    update_pi(state, hp, rng);

    const double ll = fast_log_likelihood(state, y, s, const_part);
    if (!std::isfinite(ll)) {
      throw std::runtime_error("run_chain: non-finite log likelihood at "
                               "iteration " + std::to_string(iter));
    }
    trace.loglik_trace.push_back(ll);
    trace.k_trace.push_back(state.num_clusters());

    if (iter > mcmc.burn_in && (iter - mcmc.burn_in) % mcmc.thin == 0) {
      trace.sample_iterations.push_back(iter);
      trace.z_samples.push_back(state.z);
      trace.gamma_samples.push_back(state.gamma);
      trace.mu_star_samples.push_back(state.mu_star);
      trace.mu0_sum += state.mu0;
      if (mcmc.record_r) trace.r_sum += state.r.cast<double>();

      int p_gamma = 0;
      for (const auto g : state.gamma) p_gamma += g;
      trace.sample_loglik.push_back(ll);
      trace.sample_log_prior_z.push_back(
          partition_log_prior(state.z, graph, vn, config));
      trace.sample_log_prior_gamma.push_back(prior_term(p_gamma));
    }
    if (observer) observer(iter, state);
  }
  return trace;
}

}  // namespace srtmix
