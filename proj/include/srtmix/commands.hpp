#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "srtmix/data.hpp"
#include "srtmix/io.hpp"
#include "srtmix/mfm.hpp"
#include "srtmix/model_selection.hpp"
#include "srtmix/posterior.hpp"
#include "srtmix/sampler.hpp"
#include "srtmix/simulation.hpp"

namespace srtmix {

struct DataConfig {
  std::filesystem::path counts;
  CountsFormat format = CountsFormat::DenseCsv;
  std::filesystem::path coordinates;
  bool qc_enabled = false;
  QcThresholds qc;
  double adjacency_cutoff = 0.0;  // <= 0 selects the default rule
};

struct SummaryConfig {
  DgSelection dg_selection = DgSelection::Median;
  double bfdr_level = 0.05;
  std::vector<int> k_targets;
  Linkage linkage = Linkage::Average;
};

struct SimulateConfig {
  std::string pattern = "I";  // I, II, III (lattice presets), IV, custom
  SimScenario scenario;
  int replicates = 1;
  CountsFormat format = CountsFormat::DenseCsv;
  bool write_r_true = false;
  // Pattern IV: true labels and coordinates supplied from files.
  std::filesystem::path labels;
  std::filesystem::path coordinates;
};

// One configuration drives every subcommand; sections it does not need are
// ignored by that subcommand.  Parsed strictly: unknown keys are rejected.
struct RunConfig {
  DataConfig data;
  Hyperparams hp;
  MfmConfig model;
  McmcConfig mcmc;
  SummaryConfig summary;
  std::vector<double> d_grid;  // empty selects the default grid
  SimulateConfig sim;
};

RunConfig load_run_config(const std::filesystem::path& path);
std::string dump_run_config(const RunConfig& config);  // canonical JSON

// Loads counts + coordinates per the data section (QC if enabled), aligns
// coordinates to the (possibly filtered) spots by id, computes size factors
// and the adjacency graph.
struct LoadedData {
  CountMatrix counts;
  Coordinates coords;
  Eigen::VectorXd size_factors;
  SpatialGraph graph;
};
LoadedData load_dataset(const DataConfig& config);

// Subcommand drivers.  All throw on error; the CLI wrapper reports and maps
// exceptions to a nonzero exit status.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out,
                  int threads);
void cmd_fit(const RunConfig& config, const std::filesystem::path& out);
void cmd_select_d(const RunConfig& config, const std::filesystem::path& out,
                  int threads);
void cmd_summarize(const RunConfig& config, const std::filesystem::path& fit_dir,
                   const std::filesystem::path& out);
void cmd_evaluate(const std::filesystem::path& fit_dir,
                  const std::filesystem::path& truth_dir,
                  const std::filesystem::path& out);

extern const char* const kVersion;

}  // namespace srtmix
