#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

#include "srtmix/posterior.hpp"
#include "srtmix/rng.hpp"

using srtmix::ChainTrace;
using srtmix::DgSelection;
using srtmix::Linkage;
using srtmix::Rng;

namespace {

// Hand-assembled trace over n spots and p genes.
ChainTrace make_trace(const std::vector<Eigen::VectorXi>& zs,
                      const std::vector<std::vector<std::uint8_t>>& gammas,
                      const std::vector<Eigen::MatrixXd>& mus) {
  ChainTrace trace;
  trace.n = zs.front().size();
  trace.p = static_cast<long>(gammas.front().size());
  trace.z_samples = zs;
  trace.gamma_samples = gammas;
  trace.mu_star_samples = mus;
  trace.mu0_sum = Eigen::VectorXd::Zero(trace.p);
  for (std::size_t u = 0; u < zs.size(); ++u) {
    trace.sample_iterations.push_back(static_cast<long>(u) + 1);
    trace.sample_loglik.push_back(0.0);
    trace.sample_log_prior_z.push_back(0.0);
    trace.sample_log_prior_gamma.push_back(0.0);
  }
  return trace;
}

Eigen::VectorXi labels(std::initializer_list<int> values) {
  Eigen::VectorXi z(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const int v : values) z[i++] = v;
  return z;
}

ChainTrace random_trace(int n, int p, int samples, Rng& rng) {
  std::vector<Eigen::VectorXi> zs;
  std::vector<std::vector<std::uint8_t>> gammas;
  std::vector<Eigen::MatrixXd> mus;
  for (int u = 0; u < samples; ++u) {
    Eigen::VectorXi z(n);
    int next = 1;
    for (int i = 0; i < n; ++i) {
      const int pick = static_cast<int>(rng.uniform_int(next));
      z[i] = pick + 1;
      if (pick + 1 == next) ++next;  // first-appearance labels stay contiguous
    }
    const int k = z.maxCoeff();
    std::vector<std::uint8_t> gamma(p);
    for (int j = 0; j < p; ++j) gamma[j] = rng.bernoulli(0.4) ? 1 : 0;
    Eigen::MatrixXd mu(k, p);
    for (int a = 0; a < k; ++a) {
      for (int j = 0; j < p; ++j) mu(a, j) = rng.gamma(2.0, 1.0);
    }
    zs.push_back(z);
    gammas.push_back(gamma);
    mus.push_back(mu);
  }
  return make_trace(zs, gammas, mus);
}

}  // namespace

TEST_CASE("inclusion probabilities are columnwise sample means") {
  const auto z = labels({1, 1});
  const Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(1, 3);
  ChainTrace trace = make_trace({z, z, z, z},
                                {{1, 0, 1}, {1, 0, 0}, {1, 1, 1}, {1, 1, 0}},
                                {mu, mu, mu, mu});
  const Eigen::VectorXd ppi = srtmix::compute_ppi(trace);
  CHECK(ppi[0] == 1.0);
  CHECK(ppi[1] == 0.5);
  CHECK(ppi[2] == 0.5);

  ChainTrace empty;
  empty.p = 3;
  CHECK_THROWS(srtmix::compute_ppi(empty));
}

TEST_CASE("median selection thresholds at one half") {
  Eigen::VectorXd ppi(2);
  ppi << 0.9, 0.4;
  const auto [gamma, threshold] = srtmix::select_dgs(ppi, DgSelection::Median);
  CHECK(gamma == std::vector<std::uint8_t>{1, 0});
  CHECK(threshold == 0.5);
}

TEST_CASE("false-discovery selection keeps the largest feasible cut") {
  Eigen::VectorXd ppi(4);
  ppi << 0.99, 0.97, 0.6, 0.2;
  const auto [gamma, threshold] =
      srtmix::select_dgs(ppi, DgSelection::Bfdr, 0.05);
  // q = (0.01, 0.03, 0.4, 0.8); cut after two keeps mean q = 0.02 <= 0.05,
  // adding the third pushes it to 0.1467.
  CHECK(gamma == std::vector<std::uint8_t>{1, 1, 0, 0});
  CHECK(threshold == doctest::Approx(0.4).epsilon(1e-12));

  // Exhaustive verification of the same instance: scan every cut.
  int best = 0;
  for (int cut = 1; cut <= 4; ++cut) {
    double q_sum = 0.0;
    for (int m = 0; m < cut; ++m) q_sum += 1.0 - ppi[m];  // already sorted
    if (q_sum / cut <= 0.05) best = cut;
  }
  CHECK(best == 2);
}

TEST_CASE("degenerate false-discovery selections") {
  Eigen::VectorXd all_sure(3);
  all_sure << 1.0, 1.0, 1.0;
  const auto [all_gamma, all_thresh] =
      srtmix::select_dgs(all_sure, DgSelection::Bfdr, 0.05);
  CHECK(all_gamma == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(all_thresh == 1.0);

  Eigen::VectorXd weak(2);
  weak << 0.5, 0.5;
  const auto [none_gamma, none_thresh] =
      srtmix::select_dgs(weak, DgSelection::Bfdr, 0.01);
  CHECK(none_gamma == std::vector<std::uint8_t>{0, 0});
  CHECK(none_thresh == 0.0);
}

TEST_CASE("tied inclusion probabilities enter or leave together") {
  Eigen::VectorXd ppi(4);
  ppi << 0.9, 0.6, 0.6, 0.1;
  const auto [gamma, threshold] =
      srtmix::select_dgs(ppi, DgSelection::Bfdr, 0.12);
  // Admitting the tied pair would mean mean-q = (0.1+0.4+0.4)/3 = 0.3 > 0.12.
  CHECK(gamma == std::vector<std::uint8_t>{1, 0, 0, 0});
  CHECK(threshold == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("median and FDR selections agree when the FDR at half is low") {
  Eigen::VectorXd ppi(4);
  ppi << 0.99, 0.98, 0.97, 0.1;
  const auto median = srtmix::select_dgs(ppi, DgSelection::Median);
  const auto bfdr = srtmix::select_dgs(ppi, DgSelection::Bfdr, 0.05);
  CHECK(median.first == bfdr.first);
}

TEST_CASE("select_dgs validates its inputs") {
  Eigen::VectorXd bad(1);
  bad << 1.5;
  CHECK_THROWS(srtmix::select_dgs(bad, DgSelection::Median));
  Eigen::VectorXd ok(1);
  ok << 0.5;
  CHECK_THROWS(srtmix::select_dgs(ok, DgSelection::Bfdr, 0.0));
  CHECK_THROWS(srtmix::select_dgs(Eigen::VectorXd(), DgSelection::Median));
}

TEST_CASE("joint-score argmax picks the earliest best sample") {
  const auto z1 = labels({1, 1, 2});
  const auto z2 = labels({1, 2, 2});
  const auto z3 = labels({1, 2, 1});
  const Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(2, 2);
  ChainTrace trace = make_trace({z1, z2, z3}, {{1, 0}, {0, 1}, {1, 1}},
                                {mu, mu, mu});
  trace.sample_loglik = {-10.0, -5.0, -5.0};
  const auto [gamma_map, z_map] = srtmix::map_estimates(trace);
  CHECK(z_map == z2);
  CHECK(gamma_map == std::vector<std::uint8_t>{0, 1});

  ChainTrace single = make_trace({z3}, {{1, 1}}, {mu});
  CHECK(srtmix::map_estimates(single).second == z3);

  ChainTrace broken = trace;
  broken.sample_loglik.clear();
  CHECK_THROWS(srtmix::map_estimates(broken));
}

TEST_CASE("co-clustering matrix from a constant trace is the association") {
  const auto z = labels({1, 1, 2});
  const Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(2, 1);
  ChainTrace trace = make_trace({z, z}, {{1}, {1}}, {mu, mu});
  const Eigen::MatrixXd ppm = srtmix::compute_ppm(trace);
  Eigen::MatrixXd expect(3, 3);
  expect << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  CHECK(ppm == expect);
}

TEST_CASE("co-clustering matrix matches a naive double loop") {
  Rng rng(41);
  const ChainTrace trace = random_trace(7, 3, 25, rng);
  const Eigen::MatrixXd ppm = srtmix::compute_ppm(trace);
  for (int i = 0; i < 7; ++i) {
    CHECK(ppm(i, i) == 1.0);
    for (int j = 0; j < 7; ++j) {
      double mean = 0.0;
      for (const auto& z : trace.z_samples) mean += z[i] == z[j] ? 1.0 : 0.0;
      mean /= static_cast<double>(trace.num_samples());
      if (i != j) CHECK(ppm(i, j) == doctest::Approx(mean).epsilon(1e-14));
      CHECK(ppm(i, j) == ppm(j, i));
    }
  }
}

TEST_CASE("least-squares partition minimizes the exact objective") {
  Rng rng(42);
  const ChainTrace trace = random_trace(8, 2, 40, rng);
  const Eigen::MatrixXd ppm = srtmix::compute_ppm(trace);
  const Eigen::VectorXi chosen = srtmix::dahl_estimate(trace, ppm);

  // Brute-force the squared-deviation objective over all samples.
  double best_loss = std::numeric_limits<double>::infinity();
  long best_u = -1;
  for (long u = 0; u < trace.num_samples(); ++u) {
    const auto& z = trace.z_samples[u];
    double loss = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        const double ind = z[i] == z[j] ? 1.0 : 0.0;
        loss += (ind - ppm(i, j)) * (ind - ppm(i, j));
      }
    }
    if (loss < best_loss - 1e-12) {
      best_loss = loss;
      best_u = u;
    }
  }
  // The returned labels must match the brute-force winner as a partition.
  const auto& winner = trace.z_samples[best_u];
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      CHECK((chosen[i] == chosen[j]) == (winner[i] == winner[j]));
    }
  }
  // And its labels are first-appearance canonical.
  CHECK(chosen[0] == 1);
  CHECK(chosen.maxCoeff() == winner.maxCoeff());
}

TEST_CASE("the modal partition beats a corrupted copy") {
  const auto modal = labels({1, 1, 2, 2});
  const auto corrupt = labels({1, 2, 2, 2});
  const Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(2, 1);
  ChainTrace trace = make_trace({modal, modal, modal, corrupt},
                                {{1}, {1}, {1}, {1}}, {mu, mu, mu, mu});
  const Eigen::MatrixXd ppm = srtmix::compute_ppm(trace);
  CHECK(srtmix::dahl_estimate(trace, ppm) == modal);
}

TEST_CASE("aligned level means undo label switching") {
  // Two samples describe the same two clusters with swapped labels; the
  // aligned average must pair the rows back up.
  const auto za = labels({1, 1, 2, 2});
  const auto zb = labels({2, 2, 1, 1});
  Eigen::MatrixXd mu_a(2, 2), mu_b(2, 2);
  mu_a << 10.0, 11.0, 20.0, 21.0;
  mu_b << 22.0, 23.0, 12.0, 13.0;  // rows swapped and shifted by 2
  ChainTrace trace = make_trace({za, zb}, {{1, 1}, {1, 1}}, {mu_a, mu_b});
  const Eigen::MatrixXd aligned = srtmix::aligned_mu_means(trace, za);
  CHECK(aligned(0, 0) == doctest::Approx(11.0));  // (10 + 12) / 2
  CHECK(aligned(0, 1) == doctest::Approx(12.0));
  CHECK(aligned(1, 0) == doctest::Approx(21.0));  // (20 + 22) / 2
  CHECK(aligned(1, 1) == doctest::Approx(22.0));

  // A reference with an unmatched cluster is loud.
  const auto z_far = labels({1, 2, 3, 3});
  CHECK_THROWS(srtmix::aligned_mu_means(trace, z_far));
}

TEST_CASE("dropout estimate thresholds the recorded inclusion means") {
  const auto z = labels({1, 1});
  const Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(1, 2);
  ChainTrace trace = make_trace({z, z, z}, {{1, 1}, {1, 1}, {1, 1}},
                                {mu, mu, mu});
  trace.has_r = true;
  trace.r_sum.resize(2, 2);
  trace.r_sum << 3.0, 1.0, 2.0, 0.0;  // of 3 samples
  const srtmix::BinaryMat r_hat = srtmix::estimate_r(trace);
  CHECK(r_hat(0, 0) == 1);
  CHECK(r_hat(0, 1) == 0);
  CHECK(r_hat(1, 0) == 1);  // 2/3 > 0.5
  CHECK(r_hat(1, 1) == 0);

  ChainTrace no_r = trace;
  no_r.has_r = false;
  CHECK_THROWS(srtmix::estimate_r(no_r));
}

TEST_CASE("domain merging joins the nearest profiles") {
  Eigen::MatrixXd mu(3, 2);
  mu << 0.0, 5.0, 0.1, 5.0, 5.0, 5.0;  // gene 0 separates; gene 1 is inert
  const std::vector<std::uint8_t> gamma = {1, 0};
  const auto z = labels({1, 2, 3, 3, 2});

  const Eigen::VectorXi merged = srtmix::merge_domains(mu, gamma, z, 2);
  // Clusters 1 and 2 (distance 0.1) collapse; cluster 3 stays alone.
  CHECK(merged[0] == merged[1]);
  CHECK(merged[0] == merged[4]);
  CHECK(merged[2] != merged[0]);
  CHECK(merged.maxCoeff() == 2);
  CHECK(merged[0] == 1);  // first appearance

  // k_target = K leaves the partition unchanged (up to canonical labels).
  const Eigen::VectorXi same = srtmix::merge_domains(mu, gamma, z, 3);
  CHECK(same == z);
}

TEST_CASE("merges are nested coarsenings across k targets") {
  Rng rng(43);
  const int k = 6, p = 4;
  Eigen::MatrixXd mu(k, p);
  for (int a = 0; a < k; ++a) {
    for (int j = 0; j < p; ++j) mu(a, j) = rng.gamma(2.0, 1.0);
  }
  const std::vector<std::uint8_t> gamma = {1, 1, 0, 1};
  Eigen::VectorXi z(k);
  for (int i = 0; i < k; ++i) z[i] = i + 1;

  for (const auto linkage : {Linkage::Average, Linkage::Single,
                             Linkage::Complete}) {
    Eigen::VectorXi previous = srtmix::merge_domains(mu, gamma, z, k, linkage);
    for (int target = k - 1; target >= 1; --target) {
      const Eigen::VectorXi coarser =
          srtmix::merge_domains(mu, gamma, z, target, linkage);
      CHECK(coarser.maxCoeff() == target);
      // Coarsening: spots together at the finer level stay together.
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          if (previous[i] == previous[j]) CHECK(coarser[i] == coarser[j]);
        }
      }
      previous = coarser;
    }
  }
}

TEST_CASE("merging matches an independent agglomeration oracle") {
  Rng rng(44);
  const int k = 5, p = 3;
  Eigen::MatrixXd mu(k, p);
  for (int a = 0; a < k; ++a) {
    for (int j = 0; j < p; ++j) mu(a, j) = rng.uniform(0.0, 10.0);
  }
  const std::vector<std::uint8_t> gamma = {1, 1, 1};
  Eigen::VectorXi z(k);
  for (int i = 0; i < k; ++i) z[i] = i + 1;

  for (const auto linkage : {Linkage::Average, Linkage::Single,
                             Linkage::Complete}) {
    for (int target = 1; target <= k; ++target) {
      // Oracle: grow groups by repeatedly joining the closest pair under the
      // linkage evaluated on the original profile distances.
      std::vector<std::vector<int>> groups;
      for (int a = 0; a < k; ++a) groups.push_back({a});
      const auto pair_dist = [&](int a, int b) {
        return (mu.row(a) - mu.row(b)).norm();
      };
      while (static_cast<int>(groups.size()) > target) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0, bb = 1;
        for (std::size_t a = 0; a < groups.size(); ++a) {
          for (std::size_t b = a + 1; b < groups.size(); ++b) {
            double d;
            if (linkage == Linkage::Single) {
              d = std::numeric_limits<double>::infinity();
              for (int x : groups[a])
                for (int y : groups[b]) d = std::min(d, pair_dist(x, y));
            } else if (linkage == Linkage::Complete) {
              d = 0.0;
              for (int x : groups[a])
                for (int y : groups[b]) d = std::max(d, pair_dist(x, y));
            } else {
              d = 0.0;
              for (int x : groups[a])
                for (int y : groups[b]) d += pair_dist(x, y);
              d /= static_cast<double>(groups[a].size() * groups[b].size());
            }
            if (d < best) {
              best = d;
              ba = a;
              bb = b;
            }
          }
        }
        groups[ba].insert(groups[ba].end(), groups[bb].begin(),
                          groups[bb].end());
        groups.erase(groups.begin() + static_cast<long>(bb));
      }
      std::vector<int> oracle_group(k, 0);
      for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const int a : groups[g]) oracle_group[a] = static_cast<int>(g);
      }

      const Eigen::VectorXi merged =
          srtmix::merge_domains(mu, gamma, z, target, linkage);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          CHECK((merged[i] == merged[j]) ==
                (oracle_group[i] == oracle_group[j]));
        }
      }
    }
  }
}

TEST_CASE("domain merging validates its inputs") {
  Eigen::MatrixXd mu = Eigen::MatrixXd::Ones(2, 2);
  const auto z = labels({1, 2});
  CHECK_THROWS(srtmix::merge_domains(mu, {0, 0}, z, 1));       // no DGs
  CHECK_THROWS(srtmix::merge_domains(mu, {1, 0}, z, 3));       // k too large
  CHECK_THROWS(srtmix::merge_domains(mu, {1, 0}, z, 0));
  CHECK_THROWS(srtmix::merge_domains(mu, {1}, z, 1));          // length clash
  CHECK_THROWS(srtmix::merge_domains(mu, {1, 0}, labels({1, 5}), 1));
}

TEST_CASE("summary bundle is internally consistent") {
  Rng rng(45);
  ChainTrace trace = random_trace(6, 4, 30, rng);
  trace.has_r = true;
  trace.r_sum = Eigen::MatrixXd::Zero(6, 4);
  trace.mu0_sum = Eigen::VectorXd::Constant(4, 30.0 * 1.5);

  const auto summary = srtmix::summarize_chain(trace);
  CHECK(summary.ppi.size() == 4);
  CHECK(summary.gamma_hat.size() == 4);
  CHECK(summary.k_hat == summary.z_hat_ppm.maxCoeff());
  CHECK(summary.mu_hat.rows() == summary.k_hat);
  CHECK(summary.mu_hat.cols() == 4);
  CHECK(summary.ppm == summary.ppm.transpose());
  for (int i = 0; i < 6; ++i) CHECK(summary.ppm(i, i) == 1.0);
  CHECK(summary.mu0_hat == Eigen::VectorXd::Constant(4, 1.5));
  for (int j = 0; j < 4; ++j) {
    CHECK(summary.ppi[j] >= 0.0);
    CHECK(summary.ppi[j] <= 1.0);
  }
}
