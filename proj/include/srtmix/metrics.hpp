#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace srtmix {

// Adjusted Rand index between two clusterings (labels are arbitrary
// integers).  Computed from the pair counts: A pairs together in both, B
// together only in the first, C together only in the second, D in neither:
//
//   ARI = (A - (A+B)(A+C)/N) / ((A+B+A+C)/2 - (A+B)(A+C)/N),  N = C(n, 2).
//
// A degenerate denominator (both partitions all-singletons or both one
// block) yields 1 when the partitions agree and 0 otherwise.
double adjusted_rand_index(const Eigen::VectorXi& a, const Eigen::VectorXi& b);

struct ConfusionMetrics {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;
  double sensitivity = 0.0;  // 0/0 -> 0
  double specificity = 0.0;  // 0/0 -> 0
  double mcc = 0.0;          // zero denominator -> 0
};

ConfusionMetrics confusion_metrics(const std::vector<std::uint8_t>& truth,
                                   const std::vector<std::uint8_t>& predicted);

// Area under the ROC curve of scores against binary truth, as the normalized
// Mann-Whitney statistic; tied positive/negative scores count 1/2.  Requires
// at least one positive and one negative.
double auc(const std::vector<std::uint8_t>& truth,
           const Eigen::VectorXd& scores);

}  // namespace srtmix
