#pragma once

#include "dlpd/classifier.hpp"
#include "dlpd/model_selection.hpp"
#include "dlpd/simulation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <string>
#include <vector>

namespace dlpd::cli {

enum class Method { Dlpd, Lpd, Knn };

Method parse_method(const std::string& name);
std::string to_string(Method m);

/// Every option of every subcommand. Keys of the config file are the long
/// flag names without the leading dashes.
struct RunConfig {
  // simulation
  std::string model = "M1";
  Index p = 50;
  Index n1 = 100;
  Index n2 = 100;
  Index test_n1 = 100;
  Index test_n2 = 100;
  std::uint64_t seed = 1;

  // files
  std::string train = "train.csv";
  std::string test = "test.csv";
  std::string model_file = "model.json";
  std::string report;  // empty -> stdout
  std::string predictions = "predictions.csv";
  std::string plot;    // tidy beta(u) CSV; empty -> none

  // estimator
  std::string kernel = "epanechnikov";
  double tgauss_cutoff = 4.0;
  std::string method = "dlpd";
  std::string oracle;  // M1..M4 when the data come from a known model

  // tuning
  Index bw_replications = 50;
  Index bw_subset = 0;
  std::vector<double> bw_grid{0.5, 0.75, 1.0, 1.5, 2.0, 3.0};
  double bw_ridge = 1e-8;
  bool tie_bandwidths = false;
  bool joint = false;
  Index folds = 5;
  std::vector<double> lambda_grid;
  std::vector<double> lambda_multipliers{0.25, 0.5, 1.0, 2.0, 4.0};
  std::uint64_t fold_seed = 1;
  double multiplier = 0.0;  // > 0 fixes the bandwidth multiplier
  double lambda = -1.0;     // >= 0 fixes lambda
  Index knn_k = 0;          // 0 -> cross-validated

  // oracle risk
  std::string risk_method = "quadrature";
  std::size_t mc_draws = 100000;
  Index risk_grid = 21;
  Index plot_coords = 5;

  // bench
  std::vector<std::string> models{"M1", "M2", "M3", "M4"};
  std::vector<Index> dims{50};
  Index replications = 10;
  std::vector<std::string> methods{"dlpd", "lpd", "knn"};

  int threads = 0;  // 0 -> DLPD_THREADS or the OpenMP default

  ModelSpec model_spec() const;
  KernelSpec kernel_spec() const;
  TuningConfig tuning() const;
  RiskIntegration risk_integration() const;
  void validate() const;
  nlohmann::json to_json() const;
};

// Registers the shared options on `app` and the config-file flag.
void add_options(CLI::App& app, RunConfig& cfg);

// Threads from --threads, then DLPD_THREADS, then the OpenMP default.
int resolve_threads(int requested);

}  // namespace dlpd::cli
