#include "run_config.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace dlpd::cli {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, msg);
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "dlpd") return Method::Dlpd;
  if (name == "lpd") return Method::Lpd;
  if (name == "knn") return Method::Knn;
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + name + "' (dlpd, lpd, knn)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Dlpd: return "dlpd";
    case Method::Lpd: return "lpd";
    case Method::Knn: return "knn";
  }
  return "?";
}

ModelSpec RunConfig::model_spec() const {
  ModelSpec spec;
  spec.id = parse_model_id(model);
  spec.p = p;
  spec.n1 = n1;
  spec.n2 = n2;
  spec.seed = RngSeed{seed};
  spec.validate();
  return spec;
}

KernelSpec RunConfig::kernel_spec() const { return KernelSpec::parse(kernel, tgauss_cutoff); }

TuningConfig RunConfig::tuning() const {
  TuningConfig t;
  t.bandwidth.replications = bw_replications;
  t.bandwidth.subset_dim = bw_subset;
  t.bandwidth.grid = bw_grid;
  t.bandwidth.ridge = bw_ridge;
  t.lambda.folds = folds;
  t.lambda.grid = lambda_grid;
  t.lambda.rate_multipliers = lambda_multipliers;
  t.lambda.fold_seed = RngSeed{fold_seed};
  t.tie_bandwidths = tie_bandwidths;
  t.joint = joint;
  t.seed = RngSeed{seed};
  if (multiplier > 0.0) t.fixed_multiplier = multiplier;
  if (lambda >= 0.0) t.fixed_lambda = lambda;
  return t;
}

RiskIntegration RunConfig::risk_integration() const {
  RiskIntegration r;
  if (risk_method == "quadrature") {
    r.method = IntegrationMethod::Quadrature;
  } else if (risk_method == "mc") {
    r.method = IntegrationMethod::MonteCarlo;
  } else {
    throw Error(ErrorKind::InvalidArgument, "risk-method must be quadrature or mc");
  }
  r.mc_draws = mc_draws;
  return r;
}

void RunConfig::validate() const {
  parse_model_id(model);
  parse_method(method);
  kernel_spec();
  risk_integration();
  if (!oracle.empty()) parse_model_id(oracle);
  require(n1 >= 1 && n2 >= 1, "n1 and n2 must be >= 1");
  require(test_n1 >= 0 && test_n2 >= 0, "test sizes must be >= 0");
  require(folds >= 2, "folds must be >= 2");
  require(bw_replications >= 1, "bw-replications must be >= 1");
  require(!bw_grid.empty(), "bw-grid must not be empty");
  require(!lambda_multipliers.empty(), "lambda-multipliers must not be empty");
  require(knn_k >= 0, "knn-k must be >= 0");
  require(risk_grid >= 2, "risk-grid must be >= 2");
  require(plot_coords >= 1, "plot-coords must be >= 1");
  require(replications >= 1, "replications must be >= 1");
  require(threads >= 0, "threads must be >= 0");
  for (const auto& m : models) parse_model_id(m);
  for (const auto& m : methods) parse_method(m);
  for (Index d : dims) require(d > kSignalCoordinates, "dims must all be >= 21");
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"model", model},
      {"p", p},
      {"n1", n1},
      {"n2", n2},
      {"test_n1", test_n1},
      {"test_n2", test_n2},
      {"seed", seed},
      {"kernel", kernel},
      {"tgauss_cutoff", tgauss_cutoff},
      {"method", method},
      {"oracle", oracle},
      {"bw_replications", bw_replications},
      {"bw_subset", bw_subset},
      {"bw_grid", bw_grid},
      {"bw_ridge", bw_ridge},
      {"tie_bandwidths", tie_bandwidths},
      {"joint", joint},
      {"folds", folds},
      {"lambda_grid", lambda_grid},
      {"lambda_multipliers", lambda_multipliers},
      {"fold_seed", fold_seed},
      {"multiplier", multiplier},
      {"lambda", lambda},
      {"knn_k", knn_k},
      {"risk_method", risk_method},
      {"mc_draws", mc_draws},
  };
}

void add_options(CLI::App& app, RunConfig& c) {
  app.set_config("--config", "", "key=value file; flags on the command line win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--model", c.model, "simulation model M1..M4")->capture_default_str();
  app.add_option("--p", c.p, "feature dimension")->capture_default_str();
  app.add_option("--n1", c.n1, "training size of class X")->capture_default_str();
  app.add_option("--n2", c.n2, "training size of class Y")->capture_default_str();
  app.add_option("--test-n1", c.test_n1, "test size of class X")->capture_default_str();
  app.add_option("--test-n2", c.test_n2, "test size of class Y")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();

  app.add_option("--train", c.train, "training CSV")->capture_default_str();
  app.add_option("--test", c.test, "test CSV")->capture_default_str();
  app.add_option("--model-file", c.model_file, "fitted model JSON")->capture_default_str();
  app.add_option("--report", c.report, "JSON report path (default stdout)");
  app.add_option("--predictions", c.predictions, "prediction CSV")->capture_default_str();
  app.add_option("--plot", c.plot, "tidy beta(u) CSV");

  app.add_option("--kernel", c.kernel, "epanechnikov or tgauss")->capture_default_str();
  app.add_option("--tgauss-cutoff", c.tgauss_cutoff, "truncation of tgauss")->capture_default_str();
  app.add_option("--method,--baseline", c.method, "dlpd, lpd or knn")->capture_default_str();
  app.add_option("--oracle", c.oracle, "true model of the data, for oracle risks");

  app.add_option("--bw-replications", c.bw_replications, "subset CV replications N")->capture_default_str();
  app.add_option("--bw-subset", c.bw_subset, "subset dimension m (0: default)")->capture_default_str();
  app.add_option("--bw-grid", c.bw_grid, "bandwidth multipliers")->delimiter(',')->capture_default_str();
  app.add_option("--bw-ridge", c.bw_ridge, "relative ridge on subset covariances")->capture_default_str();
  app.add_flag("--tie-bandwidths", c.tie_bandwidths, "one multiplier for both classes");
  app.add_flag("--joint", c.joint, "choose multiplier and lambda together");
  app.add_option("--folds", c.folds, "lambda CV folds")->capture_default_str();
  app.add_option("--lambda-grid", c.lambda_grid, "explicit lambda candidates")->delimiter(',');
  app.add_option("--lambda-multipliers", c.lambda_multipliers, "rate multipliers C")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--fold-seed", c.fold_seed, "fold assignment seed")->capture_default_str();
  app.add_option("--multiplier", c.multiplier, "fixed bandwidth multiplier (skips CV)");
  app.add_option("--lambda", c.lambda, "fixed lambda (skips CV)");
  app.add_option("--knn-k", c.knn_k, "neighbours for knn (0: CV)")->capture_default_str();

  app.add_option("--risk-method", c.risk_method, "quadrature or mc")->capture_default_str();
  app.add_option("--mc-draws", c.mc_draws, "Monte Carlo draws")->capture_default_str();
  app.add_option("--risk-grid", c.risk_grid, "u-grid points for conditional risks")->capture_default_str();
  app.add_option("--plot-coords", c.plot_coords, "coordinates written to --plot")->capture_default_str();

  app.add_option("--models", c.models, "bench models")->delimiter(',')->capture_default_str();
  app.add_option("--dims", c.dims, "bench feature dimensions")->delimiter(',')->capture_default_str();
  app.add_option("--replications", c.replications, "bench seeds per cell")->capture_default_str();
  app.add_option("--methods", c.methods, "bench methods")->delimiter(',')->capture_default_str();

  app.add_option("--threads", c.threads, "worker threads (default: DLPD_THREADS or all cores)");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DLPD_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    throw Error(ErrorKind::InvalidArgument, std::string("DLPD_THREADS must be a positive integer, got '") + env + "'");
  }
  return omp_get_max_threads();
}

}  // namespace dlpd::cli
