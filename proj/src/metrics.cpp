#include "srtmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "srtmix/math.hpp"

namespace srtmix {

double adjusted_rand_index(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  const Eigen::Index n = a.size();
  if (n != b.size()) {
    throw std::invalid_argument("adjusted_rand_index: length mismatch");
  }
  if (n < 2) {
    throw std::invalid_argument("adjusted_rand_index: need at least two items");
  }

  // Contingency table over the (arbitrary) labels of both clusterings.
  std::map<int, int> index_a, index_b;
  for (Eigen::Index i = 0; i < n; ++i) {
    index_a.emplace(a[i], static_cast<int>(index_a.size()));
    index_b.emplace(b[i], static_cast<int>(index_b.size()));
  }
  Eigen::MatrixXd table =
      Eigen::MatrixXd::Zero(index_a.size(), index_b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    table(index_a[a[i]], index_b[b[i]]) += 1.0;
  }

  // Pair counts: together in both (A), in the first only (B), in the second
  // only (C); every term is an exact integer in double.
  double pairs_both = 0.0;
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      pairs_both += choose2(table(r, c));
    }
  }
  double pairs_a = 0.0;
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    pairs_a += choose2(table.row(r).sum());
  }
  double pairs_b = 0.0;
  for (Eigen::Index c = 0; c < table.cols(); ++c) {
    pairs_b += choose2(table.col(c).sum());
  }
  const double total = choose2(static_cast<double>(n));

  const double expected = pairs_a * pairs_b / total;
  const double numerator = pairs_both - expected;
  const double denominator = 0.5 * (pairs_a + pairs_b) - expected;
  if (denominator == 0.0) {
    // Both partitions all singletons or both a single block: agreement is
    // total whenever the partitions coincide.
    return pairs_a == pairs_b ? 1.0 : 0.0;
  }
  return numerator / denominator;
}

ConfusionMetrics confusion_metrics(const std::vector<std::uint8_t>& truth,
                                   const std::vector<std::uint8_t>& predicted) {
  if (truth.size() != predicted.size()) {
    throw std::invalid_argument("confusion_metrics: length mismatch");
  }
  if (truth.empty()) {
    throw std::invalid_argument("confusion_metrics: empty input");
  }
  ConfusionMetrics m;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const bool t = truth[j] != 0;
    const bool q = predicted[j] != 0;
    if (t && q) ++m.tp;
    if (!t && !q) ++m.tn;
    if (!t && q) ++m.fp;
    if (t && !q) ++m.fn;
  }
  m.sensitivity = (m.tp + m.fn) > 0
                      ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                      : 0.0;
  m.specificity = (m.tn + m.fp) > 0
                      ? static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp)
                      : 0.0;
  const double product = static_cast<double>(m.tp + m.fp) *
                         static_cast<double>(m.tp + m.fn) *
                         static_cast<double>(m.tn + m.fp) *
                         static_cast<double>(m.tn + m.fn);
  m.mcc = product > 0.0
              ? (static_cast<double>(m.tp) * static_cast<double>(m.tn) -
                 static_cast<double>(m.fp) * static_cast<double>(m.fn)) /
                    std::sqrt(product)
              : 0.0;
  return m;
}

double auc(const std::vector<std::uint8_t>& truth,
           const Eigen::VectorXd& scores) {
  if (static_cast<Eigen::Index>(truth.size()) != scores.size()) {
    throw std::invalid_argument("auc: length mismatch");
  }
  long positives = 0;
  for (const auto t : truth) positives += t != 0;
  const long negatives = static_cast<long>(truth.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("auc: need at least one positive and one negative");
  }

  // Normalized Mann-Whitney statistic via midranks (ties contribute 1/2).
  std::vector<std::size_t> order(truth.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scores[static_cast<Eigen::Index>(x)] < scores[static_cast<Eigen::Index>(y)];
  });

  double positive_rank_sum = 0.0;
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t stop = start;
    while (stop + 1 < order.size() &&
           scores[static_cast<Eigen::Index>(order[stop + 1])] ==
               scores[static_cast<Eigen::Index>(order[start])]) {
      ++stop;
    }
    // Midrank of the tie group [start, stop] (1-based ranks).
    const double midrank = 0.5 * (static_cast<double>(start + 1) +
                                  static_cast<double>(stop + 1));
    for (std::size_t m = start; m <= stop; ++m) {
      if (truth[order[m]] != 0) positive_rank_sum += midrank;
    }
    start = stop + 1;
  }

  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace srtmix
