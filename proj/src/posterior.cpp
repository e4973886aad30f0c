#include "srtmix/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace srtmix {

namespace {

void require_samples(const ChainTrace& trace) {
  if (trace.num_samples() == 0) {
    throw std::invalid_argument("posterior summary: trace holds no samples");
  }
}

// Indices grouped by cluster label (labels 1..K assumed).
std::vector<std::vector<int>> group_by_label(const Eigen::VectorXi& z, int k) {
  std::vector<std::vector<int>> groups(k);
  for (Eigen::Index i = 0; i < z.size(); ++i) groups[z[i] - 1].push_back(static_cast<int>(i));
  return groups;
}

Eigen::VectorXi relabel_by_first_appearance(const Eigen::VectorXi& z) {
  Eigen::VectorXi out(z.size());
  std::vector<int> relabel;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const int label = z[i];
    if (static_cast<int>(relabel.size()) < label) relabel.resize(label, 0);
    if (relabel[label - 1] == 0) {
      relabel[label - 1] = 1 + static_cast<int>(std::count_if(
                                   relabel.begin(), relabel.end(),
                                   [](int v) { return v != 0; }));
    }
    out[i] = relabel[label - 1];
  }
  return out;
}

}  // namespace

Eigen::VectorXd compute_ppi(const ChainTrace& trace) {
  require_samples(trace);
  Eigen::VectorXd ppi = Eigen::VectorXd::Zero(trace.p);
  for (const auto& gamma : trace.gamma_samples) {
    for (long j = 0; j < trace.p; ++j) ppi[j] += gamma[j];
  }
  return ppi / static_cast<double>(trace.num_samples());
}

std::pair<std::vector<std::uint8_t>, double> select_dgs(
    const Eigen::VectorXd& ppi, DgSelection method, double level) {
  const Eigen::Index p = ppi.size();
  if (p == 0) throw std::invalid_argument("select_dgs: empty PPI vector");
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(ppi[j] >= 0.0 && ppi[j] <= 1.0)) {
      throw std::invalid_argument("select_dgs: PPI outside [0, 1]");
    }
  }

  std::vector<std::uint8_t> gamma(p, 0);
  if (method == DgSelection::Median) {
    for (Eigen::Index j = 0; j < p; ++j) gamma[j] = ppi[j] >= 0.5 ? 1 : 0;
    return {gamma, 0.5};
  }

  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("select_dgs: level must be in (0, 1)");
  }
  // Smallest q = 1 - PPI first; candidate cuts sit at distinct-q boundaries
  // so exact ties enter or leave together.  Keep the largest cut whose mean
  // q (the Bayesian FDR estimate of the selection) stays at or below level.
  std::vector<Eigen::Index> order(p);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return ppi[a] > ppi[b] || (ppi[a] == ppi[b] && a < b);
  });

  Eigen::Index best_cut = 0;  // number of selected genes
  double q_sum = 0.0;
  for (Eigen::Index m = 0; m < p; ++m) {
    q_sum += 1.0 - ppi[order[m]];
    const bool boundary = m + 1 == p || ppi[order[m + 1]] != ppi[order[m]];
    if (boundary && q_sum / static_cast<double>(m + 1) <= level) {
      best_cut = m + 1;
    }
  }
  for (Eigen::Index m = 0; m < best_cut; ++m) gamma[order[m]] = 1;

  double threshold = 0.0;  // selection satisfies q = 1 - PPI < threshold
  if (best_cut == p) {
    threshold = 1.0;
  } else if (best_cut > 0) {
    threshold = 1.0 - ppi[order[best_cut]];
  }
  return {gamma, threshold};
}

std::pair<std::vector<std::uint8_t>, Eigen::VectorXi> map_estimates(
    const ChainTrace& trace) {
  require_samples(trace);
  const auto recorded = trace.z_samples.size();
  if (trace.sample_loglik.size() != recorded ||
      trace.sample_log_prior_z.size() != recorded ||
      trace.sample_log_prior_gamma.size() != recorded) {
    throw std::invalid_argument(
        "map_estimates: trace is missing joint-score records");
  }
  long best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (long u = 0; u < trace.num_samples(); ++u) {
    const double score = trace.sample_loglik[u] + trace.sample_log_prior_z[u] +
                         trace.sample_log_prior_gamma[u];
    if (score > best_score) {
      best_score = score;
      best = u;
    }
  }
  return {trace.gamma_samples[best], trace.z_samples[best]};
}

Eigen::MatrixXd compute_ppm(const ChainTrace& trace) {
  require_samples(trace);
  const long n = trace.n;
  Eigen::MatrixXd ppm = Eigen::MatrixXd::Zero(n, n);
  for (const auto& z : trace.z_samples) {
    const int k = z.maxCoeff();
    for (const auto& members : group_by_label(z, k)) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          ppm(members[a], members[b]) += 1.0;
        }
      }
    }
  }
  ppm /= static_cast<double>(trace.num_samples());
  for (long i = 0; i < n; ++i) {
    ppm(i, i) = 1.0;
    for (long j = i + 1; j < n; ++j) ppm(j, i) = ppm(i, j);
  }
  return ppm;
}

Eigen::VectorXi dahl_estimate(const ChainTrace& trace,
                              const Eigen::MatrixXd& ppm) {
  require_samples(trace);
  if (ppm.rows() != trace.n || ppm.cols() != trace.n) {
    throw std::invalid_argument("dahl_estimate: similarity matrix shape mismatch");
  }
  // Minimizing sum_{i<i'} (I(z_i = z_i') - ppm)^2 over the samples reduces to
  // minimizing sum over co-clustered pairs of (1 - 2 ppm): the ppm^2 term is
  // shared by every candidate.
  long best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (long u = 0; u < trace.num_samples(); ++u) {
    const auto& z = trace.z_samples[u];
    double loss = 0.0;
    const int k = z.maxCoeff();
    for (const auto& members : group_by_label(z, k)) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          loss += 1.0 - 2.0 * ppm(members[a], members[b]);
        }
      }
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = u;
    }
  }
  return relabel_by_first_appearance(trace.z_samples[best]);
}

Eigen::MatrixXd aligned_mu_means(const ChainTrace& trace,
                                 const Eigen::VectorXi& z_ref) {
  require_samples(trace);
  if (z_ref.size() != trace.n) {
    throw std::invalid_argument("aligned_mu_means: reference label size mismatch");
  }
  const int k_ref = z_ref.maxCoeff();
  const long p = trace.p;

  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k_ref, p);
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(k_ref);

  for (long u = 0; u < trace.num_samples(); ++u) {
    const auto& z = trace.z_samples[u];
    const int k_u = z.maxCoeff();

    Eigen::MatrixXi overlap = Eigen::MatrixXi::Zero(k_ref, k_u);
    for (long i = 0; i < trace.n; ++i) ++overlap(z_ref[i] - 1, z[i] - 1);

    // Greedy one-to-one matching by descending shared-spot count; index order
    // breaks ties so the matching is deterministic.
    struct Pair {
      int count, a, b;
    };
    std::vector<Pair> pairs;
    for (int a = 0; a < k_ref; ++a) {
      for (int b = 0; b < k_u; ++b) {
        if (overlap(a, b) > 0) pairs.push_back({overlap(a, b), a, b});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
      if (x.count != y.count) return x.count > y.count;
      if (x.a != y.a) return x.a < y.a;
      return x.b < y.b;
    });
    std::vector<bool> used_ref(k_ref, false), used_sample(k_u, false);
    for (const auto& pr : pairs) {
      if (used_ref[pr.a] || used_sample[pr.b]) continue;
      used_ref[pr.a] = true;
      used_sample[pr.b] = true;
      sums.row(pr.a) += trace.mu_star_samples[u].row(pr.b);
      hits[pr.a] += 1.0;
    }
  }

  for (int a = 0; a < k_ref; ++a) {
    if (hits[a] == 0.0) {
      throw std::logic_error("aligned_mu_means: reference cluster " +
                             std::to_string(a + 1) +
                             " never matched a sampled cluster");
    }
    sums.row(a) /= hits[a];
  }
  return sums;
}

Eigen::VectorXd mu0_mean(const ChainTrace& trace) {
  require_samples(trace);
  return trace.mu0_sum / static_cast<double>(trace.num_samples());
}

BinaryMat estimate_r(const ChainTrace& trace) {
  require_samples(trace);
  if (!trace.has_r) {
    throw std::invalid_argument(
        "estimate_r: dropout indicators were not recorded (record_r = false)");
  }
  const double u = static_cast<double>(trace.num_samples());
  BinaryMat r_hat(trace.n, trace.p);
  for (long j = 0; j < trace.p; ++j) {
    for (long i = 0; i < trace.n; ++i) {
      r_hat(i, j) = trace.r_sum(i, j) / u > 0.5 ? 1 : 0;
    }
  }
  return r_hat;
}

Eigen::VectorXi merge_domains(const Eigen::MatrixXd& mu_hat,
                              const std::vector<std::uint8_t>& gamma_hat,
                              const Eigen::VectorXi& z_hat, int k_target,
                              Linkage linkage) {
  const int k = static_cast<int>(mu_hat.rows());
  if (static_cast<Eigen::Index>(gamma_hat.size()) != mu_hat.cols()) {
    throw std::invalid_argument("merge_domains: indicator length mismatch");
  }
  if (k_target < 1 || k_target > k) {
    throw std::invalid_argument("merge_domains: k_target must be in [1, " +
                                std::to_string(k) + "]");
  }
  for (Eigen::Index i = 0; i < z_hat.size(); ++i) {
    if (z_hat[i] < 1 || z_hat[i] > k) {
      throw std::invalid_argument("merge_domains: label out of range");
    }
  }
  std::vector<int> dg_cols;
  for (std::size_t j = 0; j < gamma_hat.size(); ++j) {
    if (gamma_hat[j] != 0) dg_cols.push_back(static_cast<int>(j));
  }
  if (dg_cols.empty()) {
    throw std::invalid_argument(
        "merge_domains: no selected genes to compute profile distances from");
  }

  // Euclidean distances between cluster profiles over the selected genes.
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double d2 = 0.0;
      for (const int j : dg_cols) {
        const double diff = mu_hat(a, j) - mu_hat(b, j);
        d2 += diff * diff;
      }
      dist(a, b) = dist(b, a) = std::sqrt(d2);
    }
  }

  // Plain agglomeration over the (tiny) profile set; linkage evaluates the
  // original pairwise distances across the two groups.
  std::vector<std::vector<int>> groups(k);
  for (int a = 0; a < k; ++a) groups[a] = {a};
  const auto group_distance = [&](const std::vector<int>& ga,
                                  const std::vector<int>& gb) {
    double best = linkage == Linkage::Single
                      ? std::numeric_limits<double>::infinity()
                      : 0.0;
    double sum = 0.0;
    for (const int a : ga) {
      for (const int b : gb) {
        const double d = dist(a, b);
        sum += d;
        if (linkage == Linkage::Single) best = std::min(best, d);
        if (linkage == Linkage::Complete) best = std::max(best, d);
      }
    }
    if (linkage == Linkage::Average) {
      return sum / (static_cast<double>(ga.size()) * static_cast<double>(gb.size()));
    }
    return best;
  };

  while (static_cast<int>(groups.size()) > k_target) {
    std::size_t merge_a = 0, merge_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double d = group_distance(groups[a], groups[b]);
        if (d < best) {
          best = d;
          merge_a = a;
          merge_b = b;
        }
      }
    }
    auto& ga = groups[merge_a];
    ga.insert(ga.end(), groups[merge_b].begin(), groups[merge_b].end());
    std::sort(ga.begin(), ga.end());
    groups.erase(groups.begin() + static_cast<long>(merge_b));
  }

  std::vector<int> label_to_group(k, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const int a : groups[g]) label_to_group[a] = static_cast<int>(g) + 1;
  }
  Eigen::VectorXi merged(z_hat.size());
  for (Eigen::Index i = 0; i < z_hat.size(); ++i) {
    merged[i] = label_to_group[z_hat[i] - 1];
  }
  return relabel_by_first_appearance(merged);
}

PosteriorSummary summarize_chain(const ChainTrace& trace, DgSelection method,
                                 double bfdr_level) {
  require_samples(trace);
  PosteriorSummary summary;
  summary.ppi = compute_ppi(trace);
  std::tie(summary.gamma_hat, summary.dg_threshold) =
      select_dgs(summary.ppi, method, bfdr_level);
  summary.ppm = compute_ppm(trace);
  summary.z_hat_ppm = dahl_estimate(trace, summary.ppm);
  summary.k_hat = summary.z_hat_ppm.maxCoeff();
  std::tie(summary.gamma_map, summary.z_map) = map_estimates(trace);
  summary.mu_hat = aligned_mu_means(trace, summary.z_hat_ppm);
  summary.mu0_hat = mu0_mean(trace);
  return summary;
}

}  // namespace srtmix
