#include "srtmix/model_selection.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "srtmix/math.hpp"

namespace srtmix {

PbicRecord compute_pbic(const CountMatrix& counts, const Eigen::VectorXd& s,
                        const PosteriorSummary& summary, const BinaryMat& r_hat,
                        double d) {
  const Eigen::Index n = counts.n();
  const Eigen::Index p = counts.p();
  if (r_hat.rows() != n || r_hat.cols() != p) {
    throw std::invalid_argument("compute_pbic: dropout estimate shape mismatch");
  }
  if (summary.z_hat_ppm.size() != n ||
      static_cast<Eigen::Index>(summary.gamma_hat.size()) != p ||
      summary.mu_hat.rows() != summary.k_hat || summary.mu_hat.cols() != p) {
    throw std::invalid_argument("compute_pbic: summary shape mismatch");
  }

  double loglik = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool dg = summary.gamma_hat[j] != 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (r_hat(i, j) != 0) continue;  // estimated dropouts carry no term
      const double mu = dg ? summary.mu_hat(summary.z_hat_ppm[i] - 1, j)
                           : summary.mu0_hat[j];
      loglik += poisson_log_pmf(counts.values(i, j), s[i] * mu);
    }
  }

  int p_gamma = 0;
  for (const auto g : summary.gamma_hat) p_gamma += g;

  // Free expression levels: one per cluster for each selected gene, one
  // shared level for the rest.
  const double penalty =
      std::log(static_cast<double>(n)) *
      (static_cast<double>(p_gamma) * summary.k_hat +
       (static_cast<double>(p) - p_gamma));

  PbicRecord record;
  record.d = d;
  record.loglik = loglik;
  record.k_hat = summary.k_hat;
  record.p_gamma_hat = p_gamma;
  record.pbic = -2.0 * loglik + penalty;
  return record;
}

std::vector<double> default_d_grid() {
  return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
}

DSelection select_d(const CountMatrix& counts, const Eigen::VectorXd& s,
                    const SpatialGraph& graph, const Hyperparams& hp,
                    const MfmConfig& base_config, const McmcConfig& mcmc,
                    const std::vector<double>& d_grid, int threads,
                    DgSelection dg_method, double bfdr_level) {
  if (d_grid.empty()) {
    throw std::invalid_argument("select_d: empty interaction grid");
  }
  for (const double d : d_grid) {
    if (d < 0.0 || !std::isfinite(d)) {
      throw std::invalid_argument("select_d: grid values must be >= 0");
    }
  }
  if (threads < 1) threads = 1;

  DSelection selection;
  selection.records.resize(d_grid.size());

  // Grid points are independent chains; each gets its own derived seed so the
  // result does not depend on the number of workers.
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t g = next.fetch_add(1);
      if (g >= d_grid.size()) return;
      PbicRecord& record = selection.records[g];
      record.d = d_grid[g];
      try {
        MfmConfig config = base_config;
        config.d = d_grid[g];
        McmcConfig grid_mcmc = mcmc;
        grid_mcmc.seed = Rng::derive_seed(mcmc.seed, g);
        grid_mcmc.record_r = true;
        const ChainTrace trace =
            run_chain(counts, s, graph, hp, config, grid_mcmc);
        const PosteriorSummary summary =
            summarize_chain(trace, dg_method, bfdr_level);
        record = compute_pbic(counts, s, summary, estimate_r(trace), d_grid[g]);
      } catch (const std::exception& e) {
        record.failed = true;
        record.error = e.what();
      }
    }
  };

  if (threads == 1 || d_grid.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const std::size_t workers =
        std::min<std::size_t>(threads, d_grid.size());
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double best = std::numeric_limits<double>::infinity();
  bool any_ok = false;
  for (const auto& record : selection.records) {
    if (record.failed) continue;
    any_ok = true;
    if (record.pbic < best) {
      best = record.pbic;
      selection.best_d = record.d;
    }
  }
  if (!any_ok) {
    std::string detail;
    for (const auto& record : selection.records) {
      detail += "\n  d = " + std::to_string(record.d) + ": " + record.error;
    }
    throw std::runtime_error("select_d: every grid point failed:" + detail);
  }
  return selection;
}

}  // namespace srtmix
