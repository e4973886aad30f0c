#include "srtmix/data.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace srtmix {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_unique(const std::vector<std::string>& ids, const char* what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " id: " + id);
    }
  }
}

}  // namespace

void CountMatrix::validate() const {
  require(static_cast<Eigen::Index>(spot_ids.size()) == values.rows(),
          "count matrix: " + std::to_string(spot_ids.size()) +
              " spot ids for " + std::to_string(values.rows()) + " rows");
  require(static_cast<Eigen::Index>(gene_ids.size()) == values.cols(),
          "count matrix: " + std::to_string(gene_ids.size()) +
              " gene ids for " + std::to_string(values.cols()) + " columns");
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      if (values(i, j) < 0) {
        throw std::invalid_argument(
            "count matrix: negative entry at spot '" + spot_ids[i] +
            "', gene '" + gene_ids[j] + "'");
      }
    }
  }
  check_unique(spot_ids, "spot");
  check_unique(gene_ids, "gene");
}

namespace {

CountMatrix subset(const CountMatrix& counts, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
  CountMatrix out;
  out.values.resize(rows.size(), cols.size());
  for (std::size_t jj = 0; jj < cols.size(); ++jj) {
    for (std::size_t ii = 0; ii < rows.size(); ++ii) {
      out.values(ii, jj) = counts.values(rows[ii], cols[jj]);
    }
  }
  out.spot_ids.reserve(rows.size());
  for (const int i : rows) out.spot_ids.push_back(counts.spot_ids[i]);
  out.gene_ids.reserve(cols.size());
  for (const int j : cols) out.gene_ids.push_back(counts.gene_ids[j]);
  return out;
}

// One filtering round; spot and gene statistics both come from `counts` as
// given (the spot pass does not feed into the gene statistics within a
// round).
CountMatrix qc_round(const CountMatrix& counts, const QcThresholds& t,
                     bool* changed) {
  const Eigen::Index n = counts.n();
  const Eigen::Index p = counts.p();

  std::vector<int> keep_spots;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (counts.values.row(i).cast<long>().sum() >= t.min_spot_total) {
      keep_spots.push_back(static_cast<int>(i));
    }
  }

  std::vector<int> keep_genes;
  for (Eigen::Index j = 0; j < p; ++j) {
    long zeros = 0;
    int max_count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int v = counts.values(i, j);
      if (v == 0) ++zeros;
      max_count = std::max(max_count, v);
    }
    const bool mostly_zero =
        static_cast<double>(zeros) > t.max_gene_zero_prop * static_cast<double>(n);
    const bool never_high = max_count < t.min_gene_max;
    const bool drop = t.or_rule ? (mostly_zero || never_high)
                                : (mostly_zero && never_high);
    if (!drop) keep_genes.push_back(static_cast<int>(j));
  }

  *changed = static_cast<Eigen::Index>(keep_spots.size()) != n ||
             static_cast<Eigen::Index>(keep_genes.size()) != p;
  if (!*changed) return counts;
  return subset(counts, keep_spots, keep_genes);
}

}  // namespace

CountMatrix quality_control(const CountMatrix& counts,
                            const QcThresholds& thresholds) {
  counts.validate();
  require(thresholds.min_spot_total >= 0 && thresholds.min_gene_max >= 0 &&
              thresholds.max_gene_zero_prop >= 0.0 &&
              thresholds.max_gene_zero_prop <= 1.0,
          "quality_control: thresholds out of range");

  CountMatrix current = counts;
  bool changed = true;
  while (changed) {
    current = qc_round(current, thresholds, &changed);
    if (current.n() < 2 || current.p() < 1) {
      throw std::invalid_argument(
          "quality_control: fewer than 2 spots or 1 gene survive filtering (" +
          std::to_string(current.n()) + " spots, " +
          std::to_string(current.p()) + " genes)");
    }
  }
  return current;
}

Eigen::VectorXd compute_size_factors(const CountMatrix& counts) {
  counts.validate();
  const Eigen::Index n = counts.n();
  require(n > 0, "compute_size_factors: empty matrix");

  Eigen::VectorXd totals(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const long total = counts.values.row(i).cast<long>().sum();
    if (total <= 0) {
      throw std::invalid_argument("compute_size_factors: spot '" +
                                  counts.spot_ids[i] + "' has zero total count");
    }
    totals[i] = static_cast<double>(total);
  }
  const double mean_log = totals.array().log().mean();
  return totals / std::exp(mean_log);
}

}  // namespace srtmix
