#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "srtmix/data.hpp"
#include "srtmix/spatial.hpp"

namespace srtmix {

enum class CountsFormat { DenseCsv, SparseMtx };

// Spot coordinates paired with their identifiers.
struct Coordinates {
  std::vector<std::string> spot_ids;
  CoordsMat xy;
};

// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double x);

// --- counts -----------------------------------------------------------------
//
// Dense CSV: header "spot_id,<gene ids...>", one row per spot.
// Sparse:    MatrixMarket coordinate integer file (rows = spots, 1-based),
//            with identifier sidecars "<stem>.spots.txt" / "<stem>.genes.txt"
//            next to the .mtx, one id per line.
CountMatrix load_counts(const std::filesystem::path& path, CountsFormat format);
void write_counts(const std::filesystem::path& path, const CountMatrix& counts,
                  CountsFormat format);

// --- coordinates / labels / gene vectors ------------------------------------

// CSV "spot_id,x,y".
Coordinates load_coordinates(const std::filesystem::path& path);
void write_coordinates(const std::filesystem::path& path, const Coordinates& c);

// CSV "spot_id,label" (integer labels).
std::pair<std::vector<std::string>, Eigen::VectorXi> load_spot_labels(
    const std::filesystem::path& path);
void write_spot_labels(const std::filesystem::path& path,
                       const std::vector<std::string>& spot_ids,
                       const Eigen::VectorXi& labels);

// CSV "gene_id,<value_name>" with 0/1 or real values per gene.
std::pair<std::vector<std::string>, Eigen::VectorXd> load_gene_values(
    const std::filesystem::path& path);
void write_gene_values(const std::filesystem::path& path,
                       const std::string& value_name,
                       const std::vector<std::string>& gene_ids,
                       const Eigen::VectorXd& values);

// CSV "spot_id,<value_name>" with one real value per spot.
void write_spot_values(const std::filesystem::path& path,
                       const std::string& value_name,
                       const std::vector<std::string>& spot_ids,
                       const Eigen::VectorXd& values);

// --- matrices ---------------------------------------------------------------

// CSV "cluster,<gene ids...>", one row per cluster (1-based cluster column).
void write_cluster_matrix(const std::filesystem::path& path,
                          const Eigen::MatrixXd& values,
                          const std::vector<std::string>& gene_ids);
Eigen::MatrixXd load_cluster_matrix(const std::filesystem::path& path,
                                    std::vector<std::string>* gene_ids = nullptr);

// Pairwise posterior similarity.  Dense CSV ("spot_id,<spot ids...>") below
// the size cutoff; above it, sparse triplets "spot_i,spot_j,value" restricted
// to the strict upper triangle with value > min_value.
void write_similarity_matrix(const std::filesystem::path& dense_path,
                             const std::filesystem::path& sparse_path,
                             const Eigen::MatrixXd& ppm,
                             const std::vector<std::string>& spot_ids,
                             Eigen::Index dense_max_n = 5000,
                             double min_value = 0.01);

// CSV "iteration,<value_name>" traces.
void write_trace(const std::filesystem::path& path,
                 const std::string& value_name,
                 const std::vector<double>& values);
void write_trace(const std::filesystem::path& path,
                 const std::string& value_name,
                 const std::vector<int>& values);

// --- small utilities ---------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line);
std::vector<std::string> read_id_lines(const std::filesystem::path& path);

// FNV-1a 64-bit hash, used to fingerprint effective configurations.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace srtmix
