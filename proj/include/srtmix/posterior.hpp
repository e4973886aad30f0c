#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "srtmix/sampler.hpp"

namespace srtmix {

enum class DgSelection { Median, Bfdr };
enum class Linkage { Average, Single, Complete };

// Everything a fit run reports.
struct PosteriorSummary {
  Eigen::VectorXd ppi;                  // p, posterior inclusion probabilities
  std::vector<std::uint8_t> gamma_hat;  // p, selected indicators
  double dg_threshold = 0.5;            // PPI cutoff realized by the selection

  Eigen::VectorXi z_hat_ppm;            // similarity-based clustering estimate
  int k_hat = 0;                        // clusters in z_hat_ppm

  Eigen::VectorXi z_map;                // joint-score argmax sample
  std::vector<std::uint8_t> gamma_map;

  Eigen::MatrixXd ppm;                  // n x n pairwise co-clustering

  Eigen::MatrixXd mu_hat;               // k_hat x p, aligned posterior means
  Eigen::VectorXd mu0_hat;              // p
};

// Per-gene posterior inclusion probabilities (mean recorded indicator).
Eigen::VectorXd compute_ppi(const ChainTrace& trace);

// Selects discriminating genes.  Median: PPI >= 0.5.  Bfdr: smallest-q-first
// inclusion keeping the Bayesian FDR estimate (mean of 1 - PPI over the
// selection) at or below level; ties in PPI are kept or dropped together.
// Returns the indicators and the realized PPI threshold.
std::pair<std::vector<std::uint8_t>, double> select_dgs(
    const Eigen::VectorXd& ppi, DgSelection method, double level = 0.05);

// The recorded sample maximizing loglik + clustering prior + indicator prior;
// ties resolve to the earliest sample.
std::pair<std::vector<std::uint8_t>, Eigen::VectorXi> map_estimates(
    const ChainTrace& trace);

// Pairwise posterior co-clustering probabilities (symmetric, unit diagonal).
Eigen::MatrixXd compute_ppm(const ChainTrace& trace);

// Least-squares clustering estimate: the recorded sample minimizing
// sum_{i<i'} (I(z_i = z_i') - ppm_{ii'})^2, earliest sample on ties,
// relabeled by first appearance.
Eigen::VectorXi dahl_estimate(const ChainTrace& trace,
                              const Eigen::MatrixXd& ppm);

// Posterior means of the cluster expression levels aligned to a reference
// clustering: each sample's clusters are matched one-to-one to the reference
// clusters by descending spot overlap, and matched rows are averaged.
Eigen::MatrixXd aligned_mu_means(const ChainTrace& trace,
                                 const Eigen::VectorXi& z_ref);

Eigen::VectorXd mu0_mean(const ChainTrace& trace);

// Posterior dropout estimate: per-entry inclusion mean thresholded at 0.5.
BinaryMat estimate_r(const ChainTrace& trace);

// Merges clusters into k_target groups by agglomerating the expression
// profiles restricted to the selected genes (Euclidean distance, chosen
// linkage).  Returns the merged label per spot (labels 1..k_target by first
// appearance).  Requires 1 <= k_target <= #clusters and at least one
// selected gene.
Eigen::VectorXi merge_domains(const Eigen::MatrixXd& mu_hat,
                              const std::vector<std::uint8_t>& gamma_hat,
                              const Eigen::VectorXi& z_hat, int k_target,
                              Linkage linkage = Linkage::Average);

// Convenience bundle: PPI, DG selection, similarity matrix, clustering
// estimates, aligned expression means.
PosteriorSummary summarize_chain(const ChainTrace& trace,
                                 DgSelection method = DgSelection::Median,
                                 double bfdr_level = 0.05);

}  // namespace srtmix
