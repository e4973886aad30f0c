#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "srtmix/commands.hpp"
#include "srtmix/data.hpp"
#include "srtmix/metrics.hpp"
#include "srtmix/mfm.hpp"
#include "srtmix/model_selection.hpp"
#include "srtmix/posterior.hpp"
#include "srtmix/sampler.hpp"
#include "srtmix/simulation.hpp"
#include "srtmix/spatial.hpp"

namespace py = pybind11;
using namespace srtmix;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero-inflated Poisson mixture modeling of spatial expression "
            "count data";
  m.attr("__version__") = kVersion;

  py::class_<CountMatrix>(m, "CountMatrix")
      .def(py::init([](const Eigen::MatrixXi& values,
                       std::vector<std::string> spot_ids,
                       std::vector<std::string> gene_ids) {
             CountMatrix counts{values, std::move(spot_ids), std::move(gene_ids)};
             counts.validate();
             return counts;
           }),
           py::arg("values"), py::arg("spot_ids"), py::arg("gene_ids"))
      .def_readonly("values", &CountMatrix::values)
      .def_readonly("spot_ids", &CountMatrix::spot_ids)
      .def_readonly("gene_ids", &CountMatrix::gene_ids)
      .def_property_readonly("n", &CountMatrix::n)
      .def_property_readonly("p", &CountMatrix::p);

  m.def(
      "quality_control",
      [](const CountMatrix& counts, long min_spot_total,
         double max_gene_zero_prop, long min_gene_max, bool or_rule) {
        return quality_control(counts, {min_spot_total, max_gene_zero_prop,
                                        min_gene_max, or_rule});
      },
      py::arg("counts"), py::arg("min_spot_total") = 100,
      py::arg("max_gene_zero_prop") = 0.9, py::arg("min_gene_max") = 10,
      py::arg("or_rule") = false);
  m.def("compute_size_factors", &compute_size_factors, py::arg("counts"));

  py::class_<SpatialGraph>(m, "SpatialGraph")
      .def_readonly("coords", &SpatialGraph::coords)
      .def_readonly("neighbors", &SpatialGraph::neighbors)
      .def_readonly("threshold", &SpatialGraph::threshold)
      .def_property_readonly("n", &SpatialGraph::n)
      .def("degree", &SpatialGraph::degree, py::arg("i"))
      .def("has_edge", &SpatialGraph::has_edge, py::arg("i"), py::arg("j"))
      .def("num_edges", &SpatialGraph::num_edges);
  m.def("build_adjacency", &build_adjacency, py::arg("coords"), py::arg("c0"));
  m.def("default_adjacency_threshold", &default_adjacency_threshold,
        py::arg("coords"));

  py::class_<MfmConfig>(m, "MfmConfig")
      .def(py::init([](double alpha0, double lambda_, double d) {
             MfmConfig config{alpha0, lambda_, d};
             config.validate();
             return config;
           }),
           py::arg("alpha0") = 1.0, py::arg("lambda_") = 1.0, py::arg("d") = 0.0)
      .def_readwrite("alpha0", &MfmConfig::alpha0)
      .def_readwrite("lambda_", &MfmConfig::lambda)
      .def_readwrite("d", &MfmConfig::d);

  py::class_<VnTable>(m, "VnTable")
      .def_static("compute", &VnTable::compute, py::arg("n"), py::arg("config"),
                  py::arg("t_max"), py::arg("rel_tol") = 1e-12)
      .def("log_vn", &VnTable::log_vn, py::arg("t"))
      .def_property_readonly("n", &VnTable::n)
      .def_property_readonly("t_max", &VnTable::t_max);

  m.def("urn_existing_log_weight", &urn_existing_log_weight,
        py::arg("cluster_size"), py::arg("neighbor_count"), py::arg("config"));
  m.def("urn_new_log_weight", &urn_new_log_weight, py::arg("t"), py::arg("vn"),
        py::arg("config"));
  m.def("partition_log_prior", &partition_log_prior, py::arg("z"),
        py::arg("graph"), py::arg("vn"), py::arg("config"));

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("alpha_mu", &Hyperparams::alpha_mu)
      .def_readwrite("beta_mu", &Hyperparams::beta_mu)
      .def_readwrite("alpha_pi", &Hyperparams::alpha_pi)
      .def_readwrite("beta_pi", &Hyperparams::beta_pi)
      .def_readwrite("alpha_omega", &Hyperparams::alpha_omega)
      .def_readwrite("beta_omega", &Hyperparams::beta_omega)
      .def_readwrite("move_prob_rho", &Hyperparams::move_prob_rho);

  py::class_<McmcConfig>(m, "McmcConfig")
      .def(py::init<>())
      .def_readwrite("iterations", &McmcConfig::iterations)
      .def_readwrite("burn_in", &McmcConfig::burn_in)
      .def_readwrite("thin", &McmcConfig::thin)
      .def_readwrite("seed", &McmcConfig::seed)
      .def_readwrite("record_r", &McmcConfig::record_r)
      .def_readwrite("k_init", &McmcConfig::k_init)
      .def_readwrite("gamma_moves_per_sweep", &McmcConfig::gamma_moves_per_sweep);

  py::class_<ChainTrace>(m, "ChainTrace")
      .def_readonly("n", &ChainTrace::n)
      .def_readonly("p", &ChainTrace::p)
      .def_readonly("loglik_trace", &ChainTrace::loglik_trace)
      .def_readonly("k_trace", &ChainTrace::k_trace)
      .def_readonly("sample_iterations", &ChainTrace::sample_iterations)
      .def_readonly("z_samples", &ChainTrace::z_samples)
      .def_readonly("gamma_samples", &ChainTrace::gamma_samples)
      .def_readonly("sample_loglik", &ChainTrace::sample_loglik)
      .def_property_readonly("num_samples", &ChainTrace::num_samples);

  m.def("gene_cluster_marginal_loglik",
        [](const std::vector<int>& ys, const std::vector<double>& ss,
           double alpha, double beta) {
          return gene_cluster_marginal_loglik(ys, ss, alpha, beta);
        },
        py::arg("ys"), py::arg("ss"), py::arg("alpha"), py::arg("beta"));

  m.def("run_chain",
        [](const CountMatrix& counts, const Eigen::VectorXd& s,
           const SpatialGraph& graph, const Hyperparams& hp,
           const MfmConfig& config, const McmcConfig& mcmc) {
          py::gil_scoped_release release;
          return run_chain(counts, s, graph, hp, config, mcmc);
        },
        py::arg("counts"), py::arg("size_factors"), py::arg("graph"),
        py::arg("hp") = Hyperparams{}, py::arg("config") = MfmConfig{},
        py::arg("mcmc") = McmcConfig{});

  py::enum_<DgSelection>(m, "DgSelection")
      .value("MEDIAN", DgSelection::Median)
      .value("BFDR", DgSelection::Bfdr);
  py::enum_<Linkage>(m, "Linkage")
      .value("AVERAGE", Linkage::Average)
      .value("SINGLE", Linkage::Single)
      .value("COMPLETE", Linkage::Complete);

  py::class_<PosteriorSummary>(m, "PosteriorSummary")
      .def_readonly("ppi", &PosteriorSummary::ppi)
      .def_readonly("gamma_hat", &PosteriorSummary::gamma_hat)
      .def_readonly("dg_threshold", &PosteriorSummary::dg_threshold)
      .def_readonly("z_hat_ppm", &PosteriorSummary::z_hat_ppm)
      .def_readonly("k_hat", &PosteriorSummary::k_hat)
      .def_readonly("z_map", &PosteriorSummary::z_map)
      .def_readonly("gamma_map", &PosteriorSummary::gamma_map)
      .def_readonly("ppm", &PosteriorSummary::ppm)
      .def_readonly("mu_hat", &PosteriorSummary::mu_hat)
      .def_readonly("mu0_hat", &PosteriorSummary::mu0_hat);

  m.def("compute_ppi", &compute_ppi, py::arg("trace"));
  m.def("select_dgs", &select_dgs, py::arg("ppi"), py::arg("method"),
        py::arg("level") = 0.05);
  m.def("map_estimates", &map_estimates, py::arg("trace"));
  m.def("compute_ppm", &compute_ppm, py::arg("trace"));
  m.def("dahl_estimate", &dahl_estimate, py::arg("trace"), py::arg("ppm"));
  m.def("aligned_mu_means", &aligned_mu_means, py::arg("trace"), py::arg("z_ref"));
  m.def("estimate_r", &estimate_r, py::arg("trace"));
  m.def("merge_domains", &merge_domains, py::arg("mu_hat"), py::arg("gamma_hat"),
        py::arg("z_hat"), py::arg("k_target"),
        py::arg("linkage") = Linkage::Average);
  m.def("summarize_chain", &summarize_chain, py::arg("trace"),
        py::arg("method") = DgSelection::Median, py::arg("bfdr_level") = 0.05);

  py::class_<PbicRecord>(m, "PbicRecord")
      .def_readonly("d", &PbicRecord::d)
      .def_readonly("pbic", &PbicRecord::pbic)
      .def_readonly("loglik", &PbicRecord::loglik)
      .def_readonly("k_hat", &PbicRecord::k_hat)
      .def_readonly("p_gamma_hat", &PbicRecord::p_gamma_hat)
      .def_readonly("failed", &PbicRecord::failed)
      .def_readonly("error", &PbicRecord::error);
  m.def("compute_pbic", &compute_pbic, py::arg("counts"), py::arg("size_factors"),
        py::arg("summary"), py::arg("r_hat"), py::arg("d"));

  py::class_<DSelection>(m, "DSelection")
      .def_readonly("best_d", &DSelection::best_d)
      .def_readonly("records", &DSelection::records);
  m.def("select_d",
        [](const CountMatrix& counts, const Eigen::VectorXd& s,
           const SpatialGraph& graph, const Hyperparams& hp,
           const MfmConfig& base_config, const McmcConfig& mcmc,
           const std::vector<double>& d_grid, int threads) {
          py::gil_scoped_release release;
          return select_d(counts, s, graph, hp, base_config, mcmc, d_grid,
                          threads);
        },
        py::arg("counts"), py::arg("size_factors"), py::arg("graph"),
        py::arg("hp"), py::arg("base_config"), py::arg("mcmc"),
        py::arg("d_grid"), py::arg("threads") = 1);
  m.def("default_d_grid", &default_d_grid);

  py::class_<SimScenario>(m, "SimScenario")
      .def(py::init<>())
      .def_readwrite("height", &SimScenario::height)
      .def_readwrite("width", &SimScenario::width)
      .def_readwrite("k", &SimScenario::k)
      .def_readwrite("potts_beta", &SimScenario::potts_beta)
      .def_readwrite("potts_sweeps", &SimScenario::potts_sweeps)
      .def_readwrite("p", &SimScenario::p)
      .def_readwrite("p_gamma", &SimScenario::p_gamma)
      .def_readwrite("pi", &SimScenario::pi)
      .def_readwrite("seed", &SimScenario::seed);

  py::class_<SimDataset>(m, "SimDataset")
      .def_readonly("counts", &SimDataset::counts)
      .def_property_readonly(
          "coords", [](const SimDataset& d) { return d.coords.xy; })
      .def_readonly("z_true", &SimDataset::z_true)
      .def_readonly("gamma_true", &SimDataset::gamma_true)
      .def_readonly("mu_star_true", &SimDataset::mu_star_true)
      .def_readonly("mu0_true", &SimDataset::mu0_true)
      .def_readonly("s_true", &SimDataset::s_true);

  m.def("generate_dataset", [](const SimScenario& scenario) {
    py::gil_scoped_release release;
    return generate_dataset(scenario);
  }, py::arg("scenario"));
  m.def("sample_potts",
        [](int height, int width, int k, double beta, int sweeps,
           std::uint64_t seed) {
          Rng rng(seed);
          return sample_potts(height, width, k, beta, sweeps, rng);
        },
        py::arg("height"), py::arg("width"), py::arg("k"), py::arg("beta"),
        py::arg("sweeps"), py::arg("seed"));

  m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));
  m.def("confusion_metrics",
        [](const std::vector<std::uint8_t>& truth,
           const std::vector<std::uint8_t>& predicted) {
          const ConfusionMetrics c = confusion_metrics(truth, predicted);
          py::dict out;
          out["tp"] = c.tp;
          out["tn"] = c.tn;
          out["fp"] = c.fp;
          out["fn"] = c.fn;
          out["sensitivity"] = c.sensitivity;
          out["specificity"] = c.specificity;
          out["mcc"] = c.mcc;
          return out;
        },
        py::arg("truth"), py::arg("predicted"));
  m.def("auc", &auc, py::arg("truth"), py::arg("scores"));
}
