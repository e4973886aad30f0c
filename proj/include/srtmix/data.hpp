#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace srtmix {

// Spot-by-gene raw count matrix with row (spot) and column (gene) identifiers.
// Rows are spots, columns are genes, entries are non-negative integers.
struct CountMatrix {
  Eigen::MatrixXi values;              // n x p
  std::vector<std::string> spot_ids;   // length n
  std::vector<std::string> gene_ids;   // length p

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }

  // Throws std::invalid_argument on negative entries, id/shape mismatches,
  // or duplicate identifiers.
  void validate() const;
};

struct QcThresholds {
  // A spot is kept iff its total count is >= min_spot_total.
  long min_spot_total = 100;
  // A gene is dropped when it is both mostly zero and never expressed above
  // min_gene_max; with or_rule=true either condition alone drops it.
  double max_gene_zero_prop = 0.9;
  long min_gene_max = 10;
  bool or_rule = false;
};

// Filters low-quality spots and uninformative genes.  Each round computes
// both spot and gene statistics from the round's input matrix, drops failing
// spots then failing genes, and rounds repeat until nothing changes, so the
// result is a fixed point of the filter (gene removal can push a borderline
// spot below the total-count threshold, and vice versa).  Throws if fewer
// than two spots or one gene survive.
CountMatrix quality_control(const CountMatrix& counts,
                            const QcThresholds& thresholds = {});

// Normalized library-size factors: s_i = T_i / g, where T_i is the total
// count of spot i and g is the geometric mean of the totals (computed via
// mean of logs for overflow safety).  Requires every spot total positive.
Eigen::VectorXd compute_size_factors(const CountMatrix& counts);

}  // namespace srtmix
