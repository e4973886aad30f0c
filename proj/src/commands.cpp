#include "srtmix/commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "srtmix/metrics.hpp"

namespace srtmix {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kVersion = "0.1.0";

namespace {

void check_keys(const json& object, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " +
                                  context);
    }
  }
}

CountsFormat parse_format(const std::string& text) {
  if (text == "dense_csv") return CountsFormat::DenseCsv;
  if (text == "sparse_mtx") return CountsFormat::SparseMtx;
  throw std::invalid_argument("config: unknown counts format '" + text +
                              "' (expected dense_csv or sparse_mtx)");
}

std::string format_name(CountsFormat format) {
  return format == CountsFormat::DenseCsv ? "dense_csv" : "sparse_mtx";
}

DgSelection parse_dg_selection(const std::string& text) {
  if (text == "median") return DgSelection::Median;
  if (text == "bfdr") return DgSelection::Bfdr;
  throw std::invalid_argument("config: unknown dg_selection '" + text +
                              "' (expected median or bfdr)");
}

std::string dg_selection_name(DgSelection method) {
  return method == DgSelection::Median ? "median" : "bfdr";
}

Linkage parse_linkage(const std::string& text) {
  if (text == "average") return Linkage::Average;
  if (text == "single") return Linkage::Single;
  if (text == "complete") return Linkage::Complete;
  throw std::invalid_argument("config: unknown linkage '" + text +
                              "' (expected average, single, or complete)");
}

std::string linkage_name(Linkage linkage) {
  switch (linkage) {
    case Linkage::Average: return "average";
    case Linkage::Single: return "single";
    default: return "complete";
  }
}

fs::path resolve(const fs::path& base, const fs::path& path) {
  if (path.empty() || path.is_absolute()) return path;
  return base / path;
}

}  // namespace

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path.string() + ": " + e.what());
  }

  RunConfig config;
  check_keys(root, {"data", "model", "mcmc", "summary", "selection", "simulate"},
             "top level");

  if (root.contains("data")) {
    const json& data = root["data"];
    check_keys(data, {"counts", "format", "coordinates", "qc", "adjacency_cutoff"},
               "data");
    config.data.counts = data.value("counts", std::string());
    config.data.format = parse_format(data.value("format", std::string("dense_csv")));
    config.data.coordinates = data.value("coordinates", std::string());
    config.data.adjacency_cutoff = data.value("adjacency_cutoff", 0.0);
    if (data.contains("qc")) {
      const json& qc = data["qc"];
      check_keys(qc, {"enabled", "min_spot_total", "max_gene_zero_prop",
                      "min_gene_max", "or_rule"},
                 "data.qc");
      config.data.qc_enabled = qc.value("enabled", false);
      config.data.qc.min_spot_total =
          qc.value("min_spot_total", config.data.qc.min_spot_total);
      config.data.qc.max_gene_zero_prop =
          qc.value("max_gene_zero_prop", config.data.qc.max_gene_zero_prop);
      config.data.qc.min_gene_max =
          qc.value("min_gene_max", config.data.qc.min_gene_max);
      config.data.qc.or_rule = qc.value("or_rule", config.data.qc.or_rule);
    }
  }

  if (root.contains("model")) {
    const json& model = root["model"];
    check_keys(model,
               {"alpha0", "lambda", "d", "alpha_mu", "beta_mu", "alpha_pi",
                "beta_pi", "alpha_omega", "beta_omega", "move_prob_rho"},
               "model");
    config.model.alpha0 = model.value("alpha0", config.model.alpha0);
    config.model.lambda = model.value("lambda", config.model.lambda);
    config.model.d = model.value("d", config.model.d);
    config.hp.alpha_mu = model.value("alpha_mu", config.hp.alpha_mu);
    config.hp.beta_mu = model.value("beta_mu", config.hp.beta_mu);
    config.hp.alpha_pi = model.value("alpha_pi", config.hp.alpha_pi);
    config.hp.beta_pi = model.value("beta_pi", config.hp.beta_pi);
    config.hp.alpha_omega = model.value("alpha_omega", config.hp.alpha_omega);
    config.hp.beta_omega = model.value("beta_omega", config.hp.beta_omega);
    config.hp.move_prob_rho = model.value("move_prob_rho", config.hp.move_prob_rho);
  }

  if (root.contains("mcmc")) {
    const json& mcmc = root["mcmc"];
    check_keys(mcmc,
               {"iterations", "burn_in", "thin", "seed", "record_r", "k_init",
                "gamma_moves_per_sweep"},
               "mcmc");
    config.mcmc.iterations = mcmc.value("iterations", config.mcmc.iterations);
    config.mcmc.burn_in = mcmc.value("burn_in", config.mcmc.burn_in);
    config.mcmc.thin = mcmc.value("thin", config.mcmc.thin);
    config.mcmc.seed = mcmc.value("seed", config.mcmc.seed);
    config.mcmc.record_r = mcmc.value("record_r", config.mcmc.record_r);
    config.mcmc.k_init = mcmc.value("k_init", config.mcmc.k_init);
    config.mcmc.gamma_moves_per_sweep =
        mcmc.value("gamma_moves_per_sweep", config.mcmc.gamma_moves_per_sweep);
  }

  if (root.contains("summary")) {
    const json& summary = root["summary"];
    check_keys(summary, {"dg_selection", "bfdr_level", "k_targets", "linkage"},
               "summary");
    config.summary.dg_selection =
        parse_dg_selection(summary.value("dg_selection", std::string("median")));
    config.summary.bfdr_level =
        summary.value("bfdr_level", config.summary.bfdr_level);
    if (summary.contains("k_targets")) {
      config.summary.k_targets =
          summary["k_targets"].get<std::vector<int>>();
    }
    config.summary.linkage =
        parse_linkage(summary.value("linkage", std::string("average")));
  }

  if (root.contains("selection")) {
    const json& selection = root["selection"];
    check_keys(selection, {"grid"}, "selection");
    if (selection.contains("grid")) {
      config.d_grid = selection["grid"].get<std::vector<double>>();
    }
  }

  if (root.contains("simulate")) {
    const json& sim = root["simulate"];
    check_keys(sim,
               {"pattern", "height", "width", "k", "potts_beta", "potts_sweeps",
                "p", "p_gamma", "pi", "seed", "replicates", "format",
                "write_r_true", "labels", "coordinates"},
               "simulate");
    config.sim.pattern = sim.value("pattern", config.sim.pattern);
    if (config.sim.pattern == "I") {
      config.sim.scenario.k = 3;
    } else if (config.sim.pattern == "II") {
      config.sim.scenario.k = 5;
    } else if (config.sim.pattern == "III") {
      config.sim.scenario.k = 7;
    } else if (config.sim.pattern != "IV" && config.sim.pattern != "custom") {
      throw std::invalid_argument("config: unknown simulate pattern '" +
                                  config.sim.pattern +
                                  "' (expected I, II, III, IV, or custom)");
    }
    SimScenario& sc = config.sim.scenario;
    sc.height = sim.value("height", sc.height);
    sc.width = sim.value("width", sc.width);
    sc.k = sim.value("k", sc.k);
    sc.potts_beta = sim.value("potts_beta", sc.potts_beta);
    sc.potts_sweeps = sim.value("potts_sweeps", sc.potts_sweeps);
    sc.p = sim.value("p", sc.p);
    sc.p_gamma = sim.value("p_gamma", sc.p_gamma);
    sc.pi = sim.value("pi", sc.pi);
    sc.seed = sim.value("seed", sc.seed);
    config.sim.replicates = sim.value("replicates", config.sim.replicates);
    config.sim.format = parse_format(sim.value("format", std::string("dense_csv")));
    config.sim.write_r_true = sim.value("write_r_true", config.sim.write_r_true);
    config.sim.labels = sim.value("labels", std::string());
    config.sim.coordinates = sim.value("coordinates", std::string());
  }

  // Relative input paths resolve against the config file's directory.
  const fs::path base = path.parent_path();
  config.data.counts = resolve(base, config.data.counts);
  config.data.coordinates = resolve(base, config.data.coordinates);
  config.sim.labels = resolve(base, config.sim.labels);
  config.sim.coordinates = resolve(base, config.sim.coordinates);
  return config;
}

namespace {

json config_to_json(const RunConfig& config) {
  json root;
  root["data"] = {
      {"counts", config.data.counts.string()},
      {"format", format_name(config.data.format)},
      {"coordinates", config.data.coordinates.string()},
      {"qc",
       {{"enabled", config.data.qc_enabled},
        {"min_spot_total", config.data.qc.min_spot_total},
        {"max_gene_zero_prop", config.data.qc.max_gene_zero_prop},
        {"min_gene_max", config.data.qc.min_gene_max},
        {"or_rule", config.data.qc.or_rule}}},
      {"adjacency_cutoff", config.data.adjacency_cutoff}};
  root["model"] = {{"alpha0", config.model.alpha0},
                   {"lambda", config.model.lambda},
                   {"d", config.model.d},
                   {"alpha_mu", config.hp.alpha_mu},
                   {"beta_mu", config.hp.beta_mu},
                   {"alpha_pi", config.hp.alpha_pi},
                   {"beta_pi", config.hp.beta_pi},
                   {"alpha_omega", config.hp.alpha_omega},
                   {"beta_omega", config.hp.beta_omega},
                   {"move_prob_rho", config.hp.move_prob_rho}};
  root["mcmc"] = {{"iterations", config.mcmc.iterations},
                  {"burn_in", config.mcmc.burn_in},
                  {"thin", config.mcmc.thin},
                  {"seed", config.mcmc.seed},
                  {"record_r", config.mcmc.record_r},
                  {"k_init", config.mcmc.k_init},
                  {"gamma_moves_per_sweep", config.mcmc.gamma_moves_per_sweep}};
  root["summary"] = {{"dg_selection", dg_selection_name(config.summary.dg_selection)},
                     {"bfdr_level", config.summary.bfdr_level},
                     {"k_targets", config.summary.k_targets},
                     {"linkage", linkage_name(config.summary.linkage)}};
  root["selection"] = {{"grid", config.d_grid}};
  root["simulate"] = {{"pattern", config.sim.pattern},
                      {"height", config.sim.scenario.height},
                      {"width", config.sim.scenario.width},
                      {"k", config.sim.scenario.k},
                      {"potts_beta", config.sim.scenario.potts_beta},
                      {"potts_sweeps", config.sim.scenario.potts_sweeps},
                      {"p", config.sim.scenario.p},
                      {"p_gamma", config.sim.scenario.p_gamma},
                      {"pi", config.sim.scenario.pi},
                      {"seed", config.sim.scenario.seed},
                      {"replicates", config.sim.replicates},
                      {"format", format_name(config.sim.format)},
                      {"write_r_true", config.sim.write_r_true},
                      {"labels", config.sim.labels.string()},
                      {"coordinates", config.sim.coordinates.string()}};
  return root;
}

void write_json_file(const fs::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << value.dump(2) << '\n';
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const RunConfig& config, std::uint64_t seed) {
  const json effective = config_to_json(config);
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = seed;
  manifest["config"] = effective;
  char hash[19];
  std::snprintf(hash, sizeof(hash), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(effective.dump())));
  manifest["config_hash"] = hash;
  write_json_file(dir / "manifest.json", manifest);
}

void write_truth_files(const fs::path& dir, const SimDataset& data,
                       const SimulateConfig& sim) {
  fs::create_directories(dir);
  const fs::path counts_path =
      dir / (sim.format == CountsFormat::DenseCsv ? "counts.csv" : "counts.mtx");
  write_counts(counts_path, data.counts, sim.format);
  write_coordinates(dir / "coords.csv", data.coords);
  write_spot_labels(dir / "z_true.csv", data.counts.spot_ids, data.z_true);

  Eigen::VectorXd gamma(data.gamma_true.size());
  for (std::size_t j = 0; j < data.gamma_true.size(); ++j) {
    gamma[j] = data.gamma_true[j];
  }
  write_gene_values(dir / "gamma_true.csv", "gamma", data.counts.gene_ids, gamma);
  write_cluster_matrix(dir / "mu_star_true.csv", data.mu_star_true,
                       data.counts.gene_ids);
  write_gene_values(dir / "mu0_true.csv", "mu0", data.counts.gene_ids,
                    data.mu0_true);
  write_spot_values(dir / "s_true.csv", "size_factor", data.counts.spot_ids,
                    data.s_true);
  if (sim.write_r_true) {
    CountMatrix r;
    r.values = data.r_true.cast<int>();
    r.spot_ids = data.counts.spot_ids;
    r.gene_ids = data.counts.gene_ids;
    write_counts(dir / "r_true.csv", r, CountsFormat::DenseCsv);
  }
}

SimDataset generate_from_files(const SimulateConfig& sim, std::uint64_t seed) {
  if (sim.labels.empty() || sim.coordinates.empty()) {
    throw std::invalid_argument(
        "simulate: pattern IV requires labels and coordinates files");
  }
  const auto [label_ids, z] = load_spot_labels(sim.labels);
  const Coordinates coords = load_coordinates(sim.coordinates);
  if (label_ids != coords.spot_ids) {
    throw std::invalid_argument(
        "simulate: label and coordinate spot ids disagree");
  }
  int k = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) k = std::max(k, z[i]);

  Rng rng(seed);
  const MuScheme scheme =
      generate_mu(k, sim.scenario.p, sim.scenario.p_gamma, rng);
  SimDataset data = generate_counts(z, scheme.mu_star, scheme.mu0,
                                    scheme.gamma_true, sim.scenario.pi, rng);
  data.coords.spot_ids = data.counts.spot_ids;
  data.coords.xy = coords.xy;
  return data;
}

void run_parallel(int threads, std::size_t jobs,
                  const std::function<void(std::size_t)>& body) {
  if (threads < 1) threads = 1;
  if (threads == 1 || jobs <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) body(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(jobs);
  const auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs) return;
      try {
        body(j);
      } catch (const std::exception& e) {
        errors[j] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(threads, jobs);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (std::size_t j = 0; j < jobs; ++j) {
    if (!errors[j].empty()) {
      throw std::runtime_error("job " + std::to_string(j + 1) + ": " + errors[j]);
    }
  }
}

}  // namespace

std::string dump_run_config(const RunConfig& config) {
  return config_to_json(config).dump(2);
}

LoadedData load_dataset(const DataConfig& config) {
  if (config.counts.empty() || config.coordinates.empty()) {
    throw std::invalid_argument(
        "data config: counts and coordinates paths are required");
  }
  LoadedData data;
  data.counts = load_counts(config.counts, config.format);
  if (config.qc_enabled) {
    data.counts = quality_control(data.counts, config.qc);
  }

  const Coordinates raw = load_coordinates(config.coordinates);
  std::map<std::string, Eigen::Index> coord_row;
  for (std::size_t i = 0; i < raw.spot_ids.size(); ++i) {
    if (!coord_row.emplace(raw.spot_ids[i], static_cast<Eigen::Index>(i)).second) {
      throw std::invalid_argument("coordinates: duplicate spot id '" +
                                  raw.spot_ids[i] + "'");
    }
  }
  data.coords.spot_ids = data.counts.spot_ids;
  data.coords.xy.resize(data.counts.n(), 2);
  for (Eigen::Index i = 0; i < data.counts.n(); ++i) {
    const auto it = coord_row.find(data.counts.spot_ids[i]);
    if (it == coord_row.end()) {
      throw std::invalid_argument("coordinates: no entry for spot '" +
                                  data.counts.spot_ids[i] + "'");
    }
    data.coords.xy.row(i) = raw.xy.row(it->second);
  }

  data.size_factors = compute_size_factors(data.counts);
  const double cutoff = config.adjacency_cutoff > 0.0
                            ? config.adjacency_cutoff
                            : default_adjacency_threshold(data.coords.xy);
  data.graph = build_adjacency(data.coords.xy, cutoff);
  return data;
}

void cmd_simulate(const RunConfig& config, const fs::path& out, int threads) {
  const SimulateConfig& sim = config.sim;
  if (sim.replicates < 1) {
    throw std::invalid_argument("simulate: replicates must be >= 1");
  }
  if (sim.pattern != "IV") sim.scenario.validate();

  fs::create_directories(out);
  const auto run_one = [&](std::size_t rep) {
    const std::uint64_t seed =
        sim.replicates == 1 ? sim.scenario.seed
                            : Rng::derive_seed(sim.scenario.seed, rep);
    fs::path dir = out;
    if (sim.replicates > 1) {
      char name[16];
      std::snprintf(name, sizeof(name), "rep_%03zu", rep + 1);
      dir = out / name;
    }

    SimDataset data;
    if (sim.pattern == "IV") {
      data = generate_from_files(sim, seed);
    } else {
      SimScenario scenario = sim.scenario;
      scenario.seed = seed;
      data = generate_dataset(scenario);
    }
    write_truth_files(dir, data, sim);
    RunConfig effective = config;
    effective.sim.scenario.seed = seed;
    write_manifest(dir, "simulate", effective, seed);
  };

  run_parallel(threads, static_cast<std::size_t>(sim.replicates), run_one);
}

namespace {

void write_fit_outputs(const fs::path& out, const RunConfig& config,
                       const LoadedData& data, const ChainTrace& trace,
                       const PosteriorSummary& summary) {
  fs::create_directories(out);
  const auto& spot_ids = data.counts.spot_ids;
  const auto& gene_ids = data.counts.gene_ids;

  write_gene_values(out / "ppi.csv", "ppi", gene_ids, summary.ppi);

  Eigen::VectorXd gamma_hat(summary.gamma_hat.size());
  for (std::size_t j = 0; j < summary.gamma_hat.size(); ++j) {
    gamma_hat[j] = summary.gamma_hat[j];
  }
  write_gene_values(out / "gamma_hat.csv", "gamma", gene_ids, gamma_hat);

  Eigen::VectorXd gamma_map(summary.gamma_map.size());
  for (std::size_t j = 0; j < summary.gamma_map.size(); ++j) {
    gamma_map[j] = summary.gamma_map[j];
  }
  write_gene_values(out / "gamma_map.csv", "gamma", gene_ids, gamma_map);

  write_spot_labels(out / "z_map.csv", spot_ids, summary.z_map);
  write_spot_labels(out / "z_ppm.csv", spot_ids, summary.z_hat_ppm);
  write_similarity_matrix(out / "ppm.csv", out / "ppm_sparse.csv", summary.ppm,
                          spot_ids);
  write_cluster_matrix(out / "mu_hat.csv", summary.mu_hat, gene_ids);
  write_gene_values(out / "mu0_hat.csv", "mu0", gene_ids, summary.mu0_hat);
  write_trace(out / "loglik_trace.csv", "loglik", trace.loglik_trace);
  write_trace(out / "k_trace.csv", "k", trace.k_trace);

  int p_gamma = 0;
  for (const auto g : summary.gamma_hat) p_gamma += g;
  double mean_loglik = 0.0;
  for (const double ll : trace.sample_loglik) mean_loglik += ll;
  if (!trace.sample_loglik.empty()) {
    mean_loglik /= static_cast<double>(trace.sample_loglik.size());
  }
  json stats;
  stats["n"] = trace.n;
  stats["p"] = trace.p;
  stats["k_hat"] = summary.k_hat;
  stats["p_gamma_hat"] = p_gamma;
  stats["dg_selection"] = dg_selection_name(config.summary.dg_selection);
  stats["dg_threshold"] = summary.dg_threshold;
  stats["num_samples"] = trace.num_samples();
  stats["mean_loglik"] = mean_loglik;
  write_json_file(out / "summary.json", stats);
}

}  // namespace

void cmd_fit(const RunConfig& config, const fs::path& out) {
  const LoadedData data = load_dataset(config.data);
  const ChainTrace trace =
      run_chain(data.counts, data.size_factors, data.graph, config.hp,
                config.model, config.mcmc);
  const PosteriorSummary summary = summarize_chain(
      trace, config.summary.dg_selection, config.summary.bfdr_level);
  write_fit_outputs(out, config, data, trace, summary);
  write_manifest(out, "fit", config, config.mcmc.seed);
}

void cmd_select_d(const RunConfig& config, const fs::path& out, int threads) {
  const LoadedData data = load_dataset(config.data);
  const std::vector<double> grid =
      config.d_grid.empty() ? default_d_grid() : config.d_grid;

  const DSelection selection =
      select_d(data.counts, data.size_factors, data.graph, config.hp,
               config.model, config.mcmc, grid, threads,
               config.summary.dg_selection, config.summary.bfdr_level);

  fs::create_directories(out);
  {
    std::ofstream csv(out / "pbic.csv");
    if (!csv) throw std::runtime_error("cannot write pbic.csv");
    csv << "d,pbic,loglik,k_hat,p_gamma_hat,status\n";
    for (const auto& record : selection.records) {
      csv << format_double(record.d) << ',';
      if (record.failed) {
        csv << ",,,,failed\n";
      } else {
        csv << format_double(record.pbic) << ',' << format_double(record.loglik)
            << ',' << record.k_hat << ',' << record.p_gamma_hat << ",ok\n";
      }
    }
  }

  json selected;
  selected["best_d"] = selection.best_d;
  json records = json::array();
  for (const auto& record : selection.records) {
    json row;
    row["d"] = record.d;
    row["failed"] = record.failed;
    if (record.failed) {
      row["error"] = record.error;
    } else {
      row["pbic"] = record.pbic;
      row["loglik"] = record.loglik;
      row["k_hat"] = record.k_hat;
      row["p_gamma_hat"] = record.p_gamma_hat;
    }
    records.push_back(row);
  }
  selected["records"] = records;
  write_json_file(out / "selected.json", selected);

  // Refit at the winner with the same derived seed its grid point used, so the
  // published fit is the exact chain the selection saw.
  std::size_t best_index = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] == selection.best_d) {
      best_index = g;
      break;
    }
  }
  RunConfig best = config;
  best.model.d = selection.best_d;
  best.mcmc.seed = Rng::derive_seed(config.mcmc.seed, best_index);
  best.mcmc.record_r = true;
  cmd_fit(best, out / "best_fit");
  write_manifest(out, "select-d", config, config.mcmc.seed);
}

void cmd_summarize(const RunConfig& config, const fs::path& fit_dir,
                   const fs::path& out) {
  const auto [ppi_genes, ppi] = load_gene_values(fit_dir / "ppi.csv");
  std::vector<std::string> mu_genes;
  const Eigen::MatrixXd mu_hat =
      load_cluster_matrix(fit_dir / "mu_hat.csv", &mu_genes);
  const auto [spot_ids, z_hat] = load_spot_labels(fit_dir / "z_ppm.csv");
  if (ppi_genes != mu_genes) {
    throw std::invalid_argument(
        "summarize: gene ids in ppi.csv and mu_hat.csv disagree");
  }

  fs::create_directories(out);
  const auto [gamma_hat, threshold] = select_dgs(
      ppi, config.summary.dg_selection, config.summary.bfdr_level);
  Eigen::VectorXd gamma(gamma_hat.size());
  for (std::size_t j = 0; j < gamma_hat.size(); ++j) gamma[j] = gamma_hat[j];
  write_gene_values(out / "gamma_hat.csv", "gamma", ppi_genes, gamma);

  json stats;
  stats["dg_selection"] = dg_selection_name(config.summary.dg_selection);
  stats["dg_threshold"] = threshold;
  int p_gamma = 0;
  for (const auto g : gamma_hat) p_gamma += g;
  stats["p_gamma_hat"] = p_gamma;
  stats["k_hat"] = z_hat.maxCoeff();

  for (const int k_target : config.summary.k_targets) {
    const Eigen::VectorXi merged = merge_domains(mu_hat, gamma_hat, z_hat,
                                                 k_target, config.summary.linkage);
    write_spot_labels(out / ("z_merged_K" + std::to_string(k_target) + ".csv"),
                      spot_ids, merged);
  }
  write_json_file(out / "summary.json", stats);
  write_manifest(out, "summarize", config, 0);
}

void cmd_evaluate(const fs::path& fit_dir, const fs::path& truth_dir,
                  const fs::path& out) {
  const auto [fit_spots_ppm, z_ppm] = load_spot_labels(fit_dir / "z_ppm.csv");
  const auto [fit_spots_map, z_map] = load_spot_labels(fit_dir / "z_map.csv");
  const auto [true_spots, z_true] = load_spot_labels(truth_dir / "z_true.csv");
  const auto [ppi_genes, ppi] = load_gene_values(fit_dir / "ppi.csv");
  const auto [gamma_genes, gamma_hat_values] =
      load_gene_values(fit_dir / "gamma_hat.csv");
  const auto [true_genes, gamma_true_values] =
      load_gene_values(truth_dir / "gamma_true.csv");

  if (fit_spots_ppm != true_spots || fit_spots_map != true_spots) {
    throw std::invalid_argument(
        "evaluate: spot ids in the fit and truth directories disagree");
  }
  if (ppi_genes != true_genes || gamma_genes != true_genes) {
    throw std::invalid_argument(
        "evaluate: gene ids in the fit and truth directories disagree");
  }

  const auto to_indicator = [](const Eigen::VectorXd& values) {
    std::vector<std::uint8_t> out_values(values.size());
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      if (values[j] != 0.0 && values[j] != 1.0) {
        throw std::invalid_argument("evaluate: indicator file holds non-binary "
                                    "value " + std::to_string(values[j]));
      }
      out_values[j] = values[j] == 1.0 ? 1 : 0;
    }
    return out_values;
  };
  const auto gamma_hat = to_indicator(gamma_hat_values);
  const auto gamma_true = to_indicator(gamma_true_values);

  const ConfusionMetrics confusion = confusion_metrics(gamma_true, gamma_hat);
  json metrics;
  metrics["ari_ppm"] = adjusted_rand_index(z_true, z_ppm);
  metrics["ari_map"] = adjusted_rand_index(z_true, z_map);
  metrics["k_hat"] = z_ppm.maxCoeff();
  metrics["k_true"] = z_true.maxCoeff();
  metrics["auc"] = auc(gamma_true, ppi);
  metrics["sensitivity"] = confusion.sensitivity;
  metrics["specificity"] = confusion.specificity;
  metrics["mcc"] = confusion.mcc;
  metrics["tp"] = confusion.tp;
  metrics["tn"] = confusion.tn;
  metrics["fp"] = confusion.fp;
  metrics["fn"] = confusion.fn;

  fs::create_directories(out);
  write_json_file(out / "metrics.json", metrics);
}

}  // namespace srtmix
