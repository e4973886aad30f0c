#include "srtmix/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace srtmix {

void SimScenario::validate() const {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("SimScenario: lattice dimensions must be >= 1");
  }
  if (k != 3 && k != 5 && k != 7) {
    throw std::invalid_argument("SimScenario: k must be 3, 5, or 7 (got " +
                                std::to_string(k) + ")");
  }
  if (p < 1) throw std::invalid_argument("SimScenario: p must be >= 1");
  if (p_gamma < 2 || p_gamma > p || p_gamma % 2 != 0) {
    throw std::invalid_argument(
        "SimScenario: p_gamma must be even and in [2, p]");
  }
  if (!(pi >= 0.0 && pi < 1.0)) {
    throw std::invalid_argument("SimScenario: pi must lie in [0, 1)");
  }
  if (!(potts_beta >= 0.0) || !std::isfinite(potts_beta)) {
    throw std::invalid_argument("SimScenario: potts_beta must be >= 0");
  }
  if (potts_sweeps < 1) {
    throw std::invalid_argument("SimScenario: potts_sweeps must be >= 1");
  }
}

Eigen::VectorXi sample_potts(int height, int width, int k, double beta,
                             int sweeps, Rng& rng) {
  if (height < 1 || width < 1 || k < 1 || sweeps < 0 || beta < 0.0) {
    throw std::invalid_argument("sample_potts: invalid arguments");
  }
  const int n = height * width;
  Eigen::VectorXi z(n);
  for (int i = 0; i < n; ++i) z[i] = 1 + static_cast<int>(rng.uniform_int(k));

  std::vector<double> log_w(k);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int row = 0; row < height; ++row) {
      for (int col = 0; col < width; ++col) {
        const int i = row * width + col;
        std::fill(log_w.begin(), log_w.end(), 0.0);
        const auto tally = [&](int nb) { log_w[z[nb] - 1] += beta; };
        if (row > 0) tally(i - width);
        if (row + 1 < height) tally(i + width);
        if (col > 0) tally(i - 1);
        if (col + 1 < width) tally(i + 1);
        z[i] = 1 + static_cast<int>(rng.categorical_from_log_weights(log_w));
      }
    }
  }
  return z;
}

MuScheme generate_mu(int k, int p, int p_gamma, Rng& rng) {
  if (k != 3 && k != 5 && k != 7) {
    throw std::invalid_argument("generate_mu: k must be 3, 5, or 7 (got " +
                                std::to_string(k) + ")");
  }
  if (p_gamma < 2 || p_gamma > p || p_gamma % 2 != 0) {
    throw std::invalid_argument("generate_mu: p_gamma must be even and in [2, p]");
  }

  MuScheme scheme;
  scheme.gamma_true.assign(p, 0);
  for (int j = 0; j < p_gamma; ++j) scheme.gamma_true[j] = 1;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  scheme.mu_star = Eigen::MatrixXd::Constant(k, p, nan);

  // Base profile on the selected genes; the remaining domains are structured
  // offsets of it.
  for (int j = 0; j < p_gamma; ++j) {
    scheme.mu_star(0, j) = rng.gamma(2.0, 1.0);
  }
  for (int j = 0; j < p_gamma; ++j) {
    scheme.mu_star(1, j) = scheme.mu_star(0, j) + 3.0;
    scheme.mu_star(2, j) = scheme.mu_star(0, j) + 6.0;
  }

  // A uniformly random half of the selected genes (Fisher-Yates prefix).
  const auto random_half = [&]() {
    std::vector<int> idx(p_gamma);
    for (int j = 0; j < p_gamma; ++j) idx[j] = j;
    for (int j = 0; j < p_gamma - 1; ++j) {
      const int swap_with =
          j + static_cast<int>(rng.uniform_int(p_gamma - j));
      std::swap(idx[j], idx[swap_with]);
    }
    std::vector<bool> in_half(p_gamma, false);
    for (int j = 0; j < p_gamma / 2; ++j) in_half[idx[j]] = true;
    return in_half;
  };

  if (k >= 5) {
    // Domain 4 boosts a random half of the selected genes, domain 5 the
    // complementary half.
    const auto half = random_half();
    for (int j = 0; j < p_gamma; ++j) {
      scheme.mu_star(3, j) = scheme.mu_star(0, j) + (half[j] ? 3.0 : 0.0);
      scheme.mu_star(4, j) = scheme.mu_star(0, j) + (half[j] ? 0.0 : 3.0);
    }
  }
  if (k == 7) {
    scheme.mu_star.block(5, 0, 1, p_gamma) =
        scheme.mu_star.block(0, 0, 1, p_gamma).array() + 9.0;
    const auto half = random_half();
    for (int j = 0; j < p_gamma; ++j) {
      scheme.mu_star(6, j) = scheme.mu_star(0, j) + (half[j] ? 9.0 : 0.0);
    }
  }

  scheme.mu0.resize(p);
  for (int j = 0; j < p; ++j) scheme.mu0[j] = rng.gamma(2.0, 1.0);
  return scheme;
}

SimDataset generate_counts(const Eigen::VectorXi& z_true,
                           const Eigen::MatrixXd& mu_star,
                           const Eigen::VectorXd& mu0,
                           const std::vector<std::uint8_t>& gamma_true,
                           double pi, Rng& rng) {
  const Eigen::Index n = z_true.size();
  const Eigen::Index p = mu0.size();
  if (n < 1) throw std::invalid_argument("generate_counts: no spots");
  if (static_cast<Eigen::Index>(gamma_true.size()) != p) {
    throw std::invalid_argument("generate_counts: indicator length mismatch");
  }
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw std::invalid_argument("generate_counts: pi must lie in [0, 1]");
  }
  const int k = static_cast<int>(mu_star.rows());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z_true[i] < 1 || z_true[i] > k) {
      throw std::invalid_argument("generate_counts: label out of range at spot " +
                                  std::to_string(i));
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (gamma_true[j] != 0) {
      for (int c = 0; c < k; ++c) {
        if (!std::isfinite(mu_star(c, j)) || mu_star(c, j) < 0.0) {
          throw std::invalid_argument(
              "generate_counts: selected gene " + std::to_string(j) +
              " lacks a finite level in domain " + std::to_string(c + 1));
        }
      }
    }
  }

  SimDataset data;
  data.z_true = z_true;
  data.gamma_true = gamma_true;
  data.mu_star_true = mu_star;
  data.mu0_true = mu0;

  data.s_true.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) data.s_true[i] = rng.uniform(0.5, 1.5);

  data.counts.values.resize(n, p);
  data.r_true = BinaryMat::Zero(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (rng.bernoulli(pi)) {
        data.r_true(i, j) = 1;
        data.counts.values(i, j) = 0;
      } else {
        const double level =
            gamma_true[j] != 0 ? mu_star(z_true[i] - 1, j) : mu0[j];
        data.counts.values(i, j) =
            static_cast<int>(rng.poisson(data.s_true[i] * level));
      }
    }
  }

  char buf[32];
  data.counts.spot_ids.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "spot_%04ld", static_cast<long>(i + 1));
    data.counts.spot_ids.emplace_back(buf);
  }
  data.counts.gene_ids.reserve(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    std::snprintf(buf, sizeof(buf), "gene_%04ld", static_cast<long>(j + 1));
    data.counts.gene_ids.emplace_back(buf);
  }
  return data;
}

SimDataset generate_dataset(const SimScenario& scenario) {
  scenario.validate();
  Rng rng(scenario.seed);

  const Eigen::VectorXi z = sample_potts(scenario.height, scenario.width,
                                         scenario.k, scenario.potts_beta,
                                         scenario.potts_sweeps, rng);
  const MuScheme scheme =
      generate_mu(scenario.k, scenario.p, scenario.p_gamma, rng);
  SimDataset data = generate_counts(z, scheme.mu_star, scheme.mu0,
                                    scheme.gamma_true, scenario.pi, rng);

  data.coords.spot_ids = data.counts.spot_ids;
  data.coords.xy.resize(z.size(), 2);
  for (int row = 0; row < scenario.height; ++row) {
    for (int col = 0; col < scenario.width; ++col) {
      const int i = row * scenario.width + col;
      data.coords.xy(i, 0) = col;
      data.coords.xy(i, 1) = row;
    }
  }
  return data;
}

}  // namespace srtmix
