#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srtmix/commands.hpp"

namespace {

using srtmix::RunConfig;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stod(item));
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    values.push_back(std::stoi(item));
  }
  return values;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations;
  std::optional<long> burn_in;
  std::optional<double> d;
  int threads = 1;

  RunConfig load() const {
    RunConfig config;
    if (!config_path.empty()) config = srtmix::load_run_config(config_path);
    if (seed) {
      config.mcmc.seed = *seed;
      config.sim.scenario.seed = *seed;
    }
    if (iterations) config.mcmc.iterations = *iterations;
    if (burn_in) config.mcmc.burn_in = *burn_in;
    if (d) config.model.d = *d;
    return config;
  }
};

void add_common_flags(CLI::App* cmd, CommonArgs* args, bool mcmc_flags) {
  cmd->add_option("--config", args->config_path, "JSON run configuration");
  cmd->add_option("--out", args->out_dir, "output directory")->required();
  cmd->add_option("--seed", args->seed, "override the base RNG seed");
  cmd->add_option("--threads", args->threads, "worker threads for independent jobs")
      ->check(CLI::PositiveNumber);
  if (mcmc_flags) {
    cmd->add_option("--iterations", args->iterations, "override MCMC iterations");
    cmd->add_option("--burn-in", args->burn_in, "override MCMC burn-in");
    cmd->add_option("--d", args->d, "override the spatial interaction strength");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-inflated Poisson mixture modeling of spatial expression "
               "count data"};
  app.set_version_flag("--version", srtmix::kVersion);
  app.require_subcommand(1);

  CommonArgs simulate_args;
  int replicates = 0;
  auto* simulate = app.add_subcommand("simulate", "generate synthetic datasets");
  add_common_flags(simulate, &simulate_args, false);
  simulate->add_option("--replicates", replicates, "number of replicate datasets");

  CommonArgs fit_args;
  auto* fit = app.add_subcommand("fit", "run the sampler on a dataset");
  add_common_flags(fit, &fit_args, true);

  CommonArgs select_args;
  std::string grid_text;
  auto* select = app.add_subcommand(
      "select-d", "fit a grid of interaction strengths and pick by pBIC");
  add_common_flags(select, &select_args, true);
  select->add_option("--grid", grid_text, "comma-separated interaction grid");

  CommonArgs summarize_args;
  std::string fit_dir_summarize;
  std::string k_target_text;
  std::optional<double> bfdr_level;
  auto* summarize = app.add_subcommand(
      "summarize", "recompute derived summaries from a fit directory");
  add_common_flags(summarize, &summarize_args, false);
  summarize->add_option("--fit", fit_dir_summarize, "fit output directory")
      ->required();
  summarize->add_option("--k-target", k_target_text,
                        "comma-separated merged domain counts");
  summarize->add_option("--bfdr-level", bfdr_level,
                        "select genes by Bayesian FDR at this level");

  std::string fit_dir_evaluate, truth_dir, eval_out;
  auto* evaluate = app.add_subcommand(
      "evaluate", "score a fit directory against simulation truth");
  evaluate->add_option("--fit", fit_dir_evaluate, "fit output directory")
      ->required();
  evaluate->add_option("--truth", truth_dir, "simulation truth directory")
      ->required();
  evaluate->add_option("--out", eval_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      RunConfig config = simulate_args.load();
      if (replicates > 0) config.sim.replicates = replicates;
      srtmix::cmd_simulate(config, simulate_args.out_dir, simulate_args.threads);
    } else if (fit->parsed()) {
      srtmix::cmd_fit(fit_args.load(), fit_args.out_dir);
    } else if (select->parsed()) {
      RunConfig config = select_args.load();
      if (!grid_text.empty()) config.d_grid = parse_double_list(grid_text);
      srtmix::cmd_select_d(config, select_args.out_dir, select_args.threads);
    } else if (summarize->parsed()) {
      RunConfig config = summarize_args.load();
      if (!k_target_text.empty()) {
        config.summary.k_targets = parse_int_list(k_target_text);
      }
      if (bfdr_level) {
        config.summary.dg_selection = srtmix::DgSelection::Bfdr;
        config.summary.bfdr_level = *bfdr_level;
      }
      srtmix::cmd_summarize(config, fit_dir_summarize, summarize_args.out_dir);
    } else if (evaluate->parsed()) {
      srtmix::cmd_evaluate(fit_dir_evaluate, truth_dir, eval_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
