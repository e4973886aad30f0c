#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "srtmix/math.hpp"
#include "srtmix/mfm.hpp"
#include "srtmix/spatial.hpp"

using srtmix::MfmConfig;
using srtmix::SpatialGraph;
using srtmix::VnTable;

namespace {

// Path graph 0-1-2-...-n-1 (unit spacing on a line, cutoff 1.2).
SpatialGraph path_graph(int n) {
  srtmix::CoordsMat coords(n, 2);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = i;
    coords(i, 1) = 0.0;
  }
  return srtmix::build_adjacency(coords, 1.2);
}

// Graph with no edges at all.
SpatialGraph edgeless_graph(int n) {
  srtmix::CoordsMat coords(n, 2);
  for (int i = 0; i < n; ++i) {
    coords(i, 0) = 10.0 * i;
    coords(i, 1) = 0.0;
  }
  return srtmix::build_adjacency(coords, 1.0);
}

}  // namespace

TEST_CASE("table coefficients hit their analytic values") {
  // For a single observation every series term reduces to P(K)/alpha0, so the
  // first coefficient is exactly 1/alpha0 regardless of the Poisson rate.
  for (const double alpha0 : {0.5, 1.0, 2.0}) {
    for (const double lambda : {0.5, 1.0, 3.0}) {
      MfmConfig cfg;
      cfg.alpha0 = alpha0;
      cfg.lambda = lambda;
      const VnTable vn = VnTable::compute(1, cfg, 1);
      CHECK(std::exp(vn.log_vn(1)) ==
            doctest::Approx(1.0 / alpha0).epsilon(1e-12));
    }
  }

  // Two observations, defaults: the series telescopes to exp(-1).
  MfmConfig unit;
  const VnTable v2 = VnTable::compute(2, unit, 2);
  CHECK(std::exp(v2.log_vn(1)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("table matches an independent direct series summation") {
  MfmConfig cfg;
  cfg.alpha0 = 1.0;
  cfg.lambda = 1.0;
  const int n = 2;
  const VnTable vn = VnTable::compute(n, cfg, 2);

  // Direct (non-log) evaluation with 500 terms; magnitudes are benign here.
  for (const int t : {1, 2}) {
    double total = 0.0;
    for (int k = t; k <= 500; ++k) {
      double term = std::exp(std::lgamma(k + 1.0) - std::lgamma(k - t + 1.0) +
                             std::lgamma(k * cfg.alpha0) -
                             std::lgamma(n + k * cfg.alpha0) -
                             cfg.lambda + (k - 1) * std::log(cfg.lambda) -
                             std::lgamma(static_cast<double>(k)));
      total += term;
    }
    CHECK(std::exp(vn.log_vn(t)) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("extension preserves existing coefficients") {
  MfmConfig cfg;
  const VnTable base = VnTable::compute(6, cfg, 2);
  const VnTable more = base.extended(5);
  CHECK(more.t_max() >= 5);
  for (int t = 1; t <= 2; ++t) {
    CHECK(more.log_vn(t) == doctest::Approx(base.log_vn(t)).epsilon(1e-14));
  }
  CHECK_THROWS(base.log_vn(3));
  CHECK_THROWS(base.log_vn(0));
  CHECK_THROWS(VnTable::compute(3, cfg, 4));  // t_max beyond n
}

TEST_CASE("existing-cluster weight follows the urn formula") {
  MfmConfig cfg;
  cfg.alpha0 = 1.0;
  cfg.d = 1.0;
  CHECK(srtmix::urn_existing_log_weight(5, 3, cfg) ==
        doctest::Approx(std::log(6.0) + 3.0).epsilon(1e-14));

  MfmConfig flat = cfg;
  flat.d = 0.0;
  CHECK(srtmix::urn_existing_log_weight(5, 3, flat) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-14));
  // No matched neighbors: the interaction term vanishes for any d.
  CHECK(srtmix::urn_existing_log_weight(5, 0, cfg) ==
        srtmix::urn_existing_log_weight(5, 0, flat));
}

TEST_CASE("new-cluster weight is the coefficient ratio and ignores d") {
  MfmConfig cfg;
  const VnTable vn = VnTable::compute(2, cfg, 2);
  const double w = srtmix::urn_new_log_weight(1, vn, cfg);
  CHECK(w == doctest::Approx(vn.log_vn(2) - vn.log_vn(1)).epsilon(1e-14));

  MfmConfig coupled = cfg;
  coupled.d = 7.0;
  CHECK(srtmix::urn_new_log_weight(1, vn, coupled) == w);
  CHECK_THROWS(srtmix::urn_new_log_weight(2, vn, cfg));  // needs t+1 entry
}

TEST_CASE("interaction term counts within-cluster edges") {
  MfmConfig flat;  // d = 0
  MfmConfig coupled;
  coupled.d = 1.0;
  const SpatialGraph path = path_graph(4);
  const VnTable vn = VnTable::compute(4, flat, 4);

  Eigen::VectorXi one_block = Eigen::VectorXi::Ones(4);
  const double lp0 = srtmix::partition_log_prior(one_block, path, vn, flat);
  const double lp1 = srtmix::partition_log_prior(one_block, path, vn, coupled);
  CHECK(lp1 - lp0 == doctest::Approx(3.0).epsilon(1e-12));  // 3 path edges

  // Without edges the coupling is inert.
  const SpatialGraph lonely = edgeless_graph(4);
  CHECK(srtmix::partition_log_prior(one_block, lonely, vn, coupled) ==
        doctest::Approx(srtmix::partition_log_prior(one_block, lonely, vn, flat))
            .epsilon(1e-14));
}

TEST_CASE("labels must be contiguous") {
  MfmConfig cfg;
  const SpatialGraph g = edgeless_graph(3);
  const VnTable vn = VnTable::compute(3, cfg, 3);
  Eigen::VectorXi gap(3);
  gap << 1, 3, 3;  // label 2 missing
  CHECK_THROWS(srtmix::partition_log_prior(gap, g, vn, cfg));
}

TEST_CASE("prior over all partitions of five spots is proper at d=0") {
  MfmConfig cfg;
  const int n = 5;
  const SpatialGraph g = edgeless_graph(n);
  const VnTable vn = VnTable::compute(n, cfg, n);

  const auto partitions = oracles::all_partitions(n);
  REQUIRE(partitions.size() == 52);  // Bell(5)
  std::vector<double> log_probs;
  for (const auto& z : partitions) {
    log_probs.push_back(srtmix::partition_log_prior(z, g, vn, cfg));
  }
  CHECK(srtmix::log_sum_exp(log_probs) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("prior depends only on cluster sizes when the graph is edgeless") {
  MfmConfig cfg;
  cfg.alpha0 = 1.5;
  const int n = 5;
  const SpatialGraph g = edgeless_graph(n);
  const VnTable vn = VnTable::compute(n, cfg, n);

  Eigen::VectorXi z(n), permuted(n);
  z << 1, 1, 2, 2, 3;
  permuted << 1, 2, 1, 3, 2;  // same size profile {2, 2, 1}
  CHECK(srtmix::partition_log_prior(z, g, vn, cfg) ==
        doctest::Approx(srtmix::partition_log_prior(permuted, g, vn, cfg))
            .epsilon(1e-13));
}

TEST_CASE("stronger coupling favors partitions with internal edges") {
  const int n = 4;
  const SpatialGraph path = path_graph(n);
  Eigen::VectorXi paired(n), singletons(n);
  paired << 1, 1, 2, 2;  // two within-cluster edges
  singletons << 1, 2, 3, 4;

  double previous = -std::numeric_limits<double>::infinity();
  for (const double d : {0.0, 0.5, 1.0, 2.0}) {
    MfmConfig cfg;
    cfg.d = d;
    const VnTable vn = VnTable::compute(n, cfg, n);
    const double gap = srtmix::partition_log_prior(paired, path, vn, cfg) -
                       srtmix::partition_log_prior(singletons, path, vn, cfg);
    CHECK(gap > previous);
    previous = gap;
  }
}

TEST_CASE("new-cluster ratio stays below one at the default configuration") {
  MfmConfig cfg;
  for (const int n : {5, 25}) {
    const int t_hi = std::min(20, n - 1);
    const VnTable vn = VnTable::compute(n, cfg, t_hi + 1);
    for (int t = 1; t <= t_hi; ++t) {
      CHECK(std::exp(srtmix::urn_new_log_weight(t, vn, cfg)) < 1.0);
    }
  }
}

// The central consistency property: the urn conditionals are exactly the
// ratios of the joint partition prior.  Checked exhaustively for every spot,
// every partition of the remaining spots, and every candidate label, on path
// graphs up to n = 6 with and without spatial coupling.
TEST_CASE("urn conditionals match joint-prior ratios") {
  for (const double d : {0.0, 1.3}) {
    MfmConfig cfg;
    cfg.d = d;
    cfg.alpha0 = 1.0;
    for (int n = 3; n <= 6; ++n) {
      const SpatialGraph g = path_graph(n);
      const VnTable vn = VnTable::compute(n, cfg, n);
      for (int i = 0; i < n; ++i) {
        const auto rest_partitions = oracles::all_partitions(n - 1);
        for (const auto& rest : rest_partitions) {
          // Embed the partition of the other spots into a full label vector.
          Eigen::VectorXi z(n);
          int pos = 0;
          for (int m = 0; m < n; ++m) {
            if (m == i) continue;
            z[m] = rest[pos++];
          }
          const int t = rest.size() > 0 ? rest.maxCoeff() : 0;

          // Urn weights, as the sampler computes them.
          std::vector<long> sizes(t, 0);
          for (int m = 0; m < n; ++m) {
            if (m != i) ++sizes[z[m] - 1];
          }
          std::vector<int> matched(t, 0);
          for (const int nb : g.neighbors[i]) {
            ++matched[z[nb] - 1];
          }
          std::vector<double> urn(t + 1);
          for (int k = 0; k < t; ++k) {
            urn[k] = srtmix::urn_existing_log_weight(sizes[k], matched[k], cfg);
          }
          urn[t] = srtmix::urn_new_log_weight(t, vn, cfg);

          // Joint prior of each completed partition.
          std::vector<double> joint(t + 1);
          for (int k = 1; k <= t + 1; ++k) {
            z[i] = k;
            joint[k - 1] = srtmix::partition_log_prior(z, g, vn, cfg);
          }

          const double urn_norm = srtmix::log_sum_exp(urn);
          const double joint_norm = srtmix::log_sum_exp(joint);
          for (int k = 0; k <= t; ++k) {
            CHECK(std::exp(urn[k] - urn_norm) ==
                  doctest::Approx(std::exp(joint[k] - joint_norm))
                      .epsilon(1e-10));
          }
        }
      }
    }
  }
}

TEST_CASE("invalid configurations are rejected") {
  MfmConfig bad;
  bad.alpha0 = 0.0;
  CHECK_THROWS(bad.validate());
  bad = MfmConfig{};
  bad.lambda = -1.0;
  CHECK_THROWS(bad.validate());
  bad = MfmConfig{};
  bad.d = -0.1;
  CHECK_THROWS(bad.validate());
  CHECK_NOTHROW(MfmConfig{}.validate());
}
