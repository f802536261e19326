#include "commands.hpp"

#include "dlpd/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>

namespace dlpd::cli {

namespace {

using nlohmann::json;

std::optional<std::string> oracle_name(const RunConfig& cfg) {
  if (cfg.oracle.empty()) return std::nullopt;
  return std::string(to_string(parse_model_id(cfg.oracle)));
}

// Evaluation u-grid: cell midpoints along the first covariate, the others
// held at 1/2. Midpoints keep Model 4 away from its singular corner.
CovariatePoint grid_point(Index k, Index points, Index d) {
  Vector u = Vector::Constant(d, 0.5);
  u[0] = (static_cast<double>(k) + 0.5) / static_cast<double>(points);
  return CovariatePoint(u);
}

json selection_json(const StoredModel& m) {
  switch (m.method) {
    case Method::Dlpd:
      return {{"hx", bandwidth_to_json(*m.hx)}, {"hy", bandwidth_to_json(*m.hy)}, {"lambda", m.lambda},
              {"kernel", m.kernel.name()}};
    case Method::Lpd:
      return {{"lambda", m.lambda}};
    case Method::Knn:
      return {{"k", m.k}};
  }
  return json::object();
}

std::vector<Prediction> predict_rows(const StoredModel& m, const Matrix& features, const Matrix& covariates) {
  const Index n = features.rows();
  std::vector<Prediction> out(static_cast<std::size_t>(n));
  switch (m.method) {
    case Method::Dlpd:
      return predict_batch(m.dlpd(), features, covariates);
    case Method::Lpd: {
      const StaticLpdModel lpd = m.lpd();
      for (Index i = 0; i < n; ++i) {
        auto& p = out[static_cast<std::size_t>(i)];
        if (!lpd.solution().optimal()) {
          p.status = PredictionStatus::Infeasible;
          continue;
        }
        p.score = lpd.score(features.row(i).transpose());
        p.label = decide(p.score);
        p.zero_direction = lpd.beta_hat().isZero(0.0);
      }
      return out;
    }
    case Method::Knn: {
      const auto labels = knn_classify_batch(m.training, features, m.k);
      for (Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)].label = labels[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)].score = std::numeric_limits<double>::quiet_NaN();
      }
      return out;
    }
  }
  return out;
}

const char* status_name(PredictionStatus s) {
  switch (s) {
    case PredictionStatus::Ok: return "ok";
    case PredictionStatus::EmptyWindow: return "empty_window";
    case PredictionStatus::Infeasible: return "infeasible";
  }
  return "?";
}

json with_header(const char* command, const RunConfig& cfg, json body) {
  json j = {{"report_version", kReportVersion}, {"command", command}, {"seed", cfg.seed}};
  j.update(body);
  return j;
}

void check_oracle_shape(const OracleModel& oracle, const DataSet& data) {
  if (oracle.feature_dim() != data.feature_dim() || oracle.covariate_dim() != data.covariate_dim()) {
    throw Error(ErrorKind::DataError, "data dimensions do not match the oracle model");
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

json expected_risk_json(const ExpectedRisk& r) {
  json j = {{"value", r.value},
            {"method", r.method == IntegrationMethod::Quadrature ? "quadrature" : "monte_carlo"},
            {"evaluations", r.evaluations}};
  if (r.method == IntegrationMethod::Quadrature) {
    j["error_estimate"] = r.error_estimate;
  } else {
    j["standard_error"] = r.standard_error;
  }
  return j;
}

StoredModel fit_model(const DataSet& train, const RunConfig& cfg) {
  StoredModel m{parse_method(cfg.method), train};
  m.oracle = oracle_name(cfg);
  switch (m.method) {
    case Method::Dlpd: {
      m.kernel = cfg.kernel_spec();
      const TuningResult t = tune_dlpd(train, m.kernel, cfg.tuning());
      m.hx = t.hx;
      m.hy = t.hy;
      m.lambda = t.lambda;
      m.tuning = tuning_to_json(t);
      break;
    }
    case Method::Lpd: {
      if (cfg.lambda >= 0.0) {
        m.lambda = cfg.lambda;
        break;
      }
      StaticLpdConfig sc;
      sc.folds = cfg.folds;
      sc.grid = cfg.lambda_grid;
      sc.rate_multipliers = cfg.lambda_multipliers;
      sc.fold_seed = RngSeed{cfg.fold_seed};
      const StaticLpdFit fit = fit_static_lpd(train, sc);
      m.lambda = fit.model.lambda();
      m.tuning = {{"lambda_grid", fit.grid}, {"lambda_scores", fit.cv_scores}};
      break;
    }
    case Method::Knn: {
      if (cfg.knn_k > 0) {
        if (cfg.knn_k > train.size()) throw Error(ErrorKind::InvalidArgument, "knn-k exceeds the training size");
        m.k = cfg.knn_k;
        break;
      }
      const KnnSelection sel = select_knn_k(train, cfg.folds, RngSeed{cfg.fold_seed});
      m.k = sel.k;
      m.tuning = {{"k_grid", sel.grid}, {"k_scores", sel.cv_scores}};
      break;
    }
  }
  return m;
}

json evaluate_model(const StoredModel& m, const DataSet& test, const RunConfig& cfg,
                    const EvaluationOptions& opts) {
  if (test.feature_dim() != m.training.feature_dim() || test.covariate_dim() != m.training.covariate_dim()) {
    throw Error(ErrorKind::DataError, "test data dimensions do not match the model");
  }
  const std::vector<Prediction> pred = predict_rows(m, test.features(), test.covariates());
  Index errors_x = 0;
  Index errors_y = 0;
  Index empty = 0;
  Index infeasible = 0;
  Index zero_direction = 0;
  for (Index i = 0; i < test.size(); ++i) {
    const Prediction& p = pred[static_cast<std::size_t>(i)];
    if (p.status == PredictionStatus::EmptyWindow) ++empty;
    if (p.status == PredictionStatus::Infeasible) ++infeasible;
    if (p.zero_direction) ++zero_direction;
    // Failed predictions count as errors.
    const bool wrong = p.status != PredictionStatus::Ok || p.label != test.label(i);
    if (wrong) ++(test.label(i) == ClassLabel::X ? errors_x : errors_y);
  }
  const Index n = test.size();
  json j = {{"method", to_string(m.method)},
            {"selected", selection_json(m)},
            {"tuning", m.tuning},
            {"n_test", n},
            {"n_test_x", test.count(ClassLabel::X)},
            {"n_test_y", test.count(ClassLabel::Y)},
            {"errors_x", errors_x},
            {"errors_y", errors_y},
            {"misclassification_rate", n > 0 ? static_cast<double>(errors_x + errors_y) / static_cast<double>(n) : 0.0},
            {"empty_window", empty},
            {"infeasible", infeasible},
            {"zero_direction", zero_direction}};

  if (!m.oracle) return j;
  const OracleModel oracle = oracle_of(parse_model_id(*m.oracle), m.training.feature_dim());
  check_oracle_shape(oracle, test);
  json oj = {{"model", *m.oracle}};
  if (opts.expected_risk) oj["expected_bayes_risk"] = expected_risk_json(bayes_expected_risk(oracle, cfg.risk_integration()));
  if (opts.conditional_risks && m.method != Method::Knn) {
    std::optional<DlpdModel> dlpd;
    std::optional<StaticLpdModel> lpd;
    if (m.method == Method::Dlpd) dlpd.emplace(m.dlpd());
    if (m.method == Method::Lpd) lpd.emplace(m.lpd());
    json grid = json::array();
    for (Index k = 0; k < cfg.risk_grid; ++k) {
      const CovariatePoint u = grid_point(k, cfg.risk_grid, test.covariate_dim());
      json row = {{"u", std::vector<double>(u.coords().data(), u.coords().data() + u.dim())},
                  {"bayes_risk", bayes_conditional_risk(oracle, u)},
                  {"plugin_risk", nullptr}};
      try {
        if (dlpd) {
          const auto fit = dlpd->local_fit(u);
          if (fit->solution.optimal()) {
            row["plugin_risk"] = dlpd_conditional_risk(fit->moments.mu_x_hat, fit->moments.mu_y_hat,
                                                       fit->solution.beta_hat, oracle, u).risk;
          }
        } else if (lpd->solution().optimal()) {
          row["plugin_risk"] = dlpd_conditional_risk(lpd->mu_x(), lpd->mu_y(), lpd->beta_hat(), oracle, u).risk;
        }
      } catch (const EmptyWindow&) {
      }
      grid.push_back(row);
    }
    oj["conditional_risks"] = grid;
  }
  j["oracle"] = oj;
  return j;
}

void write_beta_plot(const std::string& path, const StoredModel& m, const RunConfig& cfg) {
  if (m.method == Method::Knn) throw Error(ErrorKind::InvalidArgument, "--plot needs a dlpd or lpd model");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::DataError, "cannot open " + path + " for writing");
  const Index d = m.training.covariate_dim();
  const Index coords = std::min(cfg.plot_coords, m.training.feature_dim());
  std::optional<OracleModel> oracle;
  if (m.oracle) oracle.emplace(oracle_of(parse_model_id(*m.oracle), m.training.feature_dim()));
  std::optional<DlpdModel> dlpd;
  std::optional<StaticLpdModel> lpd;
  if (m.method == Method::Dlpd) dlpd.emplace(m.dlpd());
  if (m.method == Method::Lpd) lpd.emplace(m.lpd());

  out << "u,coordinate,value,series\n";
  auto emit = [&](double u, const Vector& beta, const char* series) {
    for (Index c = 0; c < coords; ++c) out << format_double(u) << ',' << c + 1 << ',' << format_double(beta[c]) << ',' << series << '\n';
  };
  for (Index k = 0; k < cfg.risk_grid; ++k) {
    const CovariatePoint u = grid_point(k, cfg.risk_grid, d);
    try {
      const Vector beta = dlpd ? dlpd->beta_hat(u) : lpd->beta_hat();
      emit(u[0], beta, "beta_hat");
    } catch (const Error&) {
      // Empty window or infeasible program: no estimate at this u.
    }
    if (oracle) emit(u[0], bayes_direction(*oracle, u), "beta_true");
  }
  if (!out) throw Error(ErrorKind::DataError, "write to " + path + " failed");
}

json cmd_simulate(const RunConfig& cfg) {
  const ModelSpec spec = cfg.model_spec();
  const DataSet train = sample_dataset(spec);
  write_csv_file(cfg.train, train);
  json files = {{"train", cfg.train}};
  if (cfg.test_n1 + cfg.test_n2 > 0) {
    write_csv_file(cfg.test, sample_test_dataset(spec, cfg.test_n1, cfg.test_n2));
    files["test"] = cfg.test;
  }
  const ExpectedRisk r = bayes_expected_risk(oracle_of(spec), cfg.risk_integration());
  std::cerr << "oracle expected Bayes risk R = " << std::setprecision(6) << r.value << " ("
            << to_string(spec.id) << ", p = " << spec.p << ")\n";
  return with_header("simulate", cfg,
                     {{"model", to_string(spec.id)},
                      {"p", spec.p},
                      {"n1", spec.n1},
                      {"n2", spec.n2},
                      {"test_n1", cfg.test_n1},
                      {"test_n2", cfg.test_n2},
                      {"files", files},
                      {"expected_bayes_risk", expected_risk_json(r)}});
}

json cmd_fit(const RunConfig& cfg) {
  const DataSet train = read_csv_file(cfg.train);
  const StoredModel m = fit_model(train, cfg);
  write_json_file(cfg.model_file, model_to_json(m));
  if (!cfg.plot.empty()) write_beta_plot(cfg.plot, m, cfg);
  return with_header("fit", cfg,
                     {{"method", to_string(m.method)},
                      {"n1", train.count(ClassLabel::X)},
                      {"n2", train.count(ClassLabel::Y)},
                      {"p", train.feature_dim()},
                      {"d", train.covariate_dim()},
                      {"selected", selection_json(m)},
                      {"tuning", m.tuning},
                      {"model_file", cfg.model_file}});
}

json cmd_predict(const RunConfig& cfg) {
  const StoredModel m = model_from_json(read_json_file(cfg.model_file));
  const DataSet test = read_csv_file(cfg.test);
  if (test.feature_dim() != m.training.feature_dim() || test.covariate_dim() != m.training.covariate_dim()) {
    throw Error(ErrorKind::DataError, "test data dimensions do not match the model");
  }
  const std::vector<Prediction> pred = predict_rows(m, test.features(), test.covariates());
  std::ofstream out(cfg.predictions, std::ios::binary);
  if (!out) throw Error(ErrorKind::DataError, "cannot open " + cfg.predictions + " for writing");
  out << "row,label,score,status\n";
  Index predicted_x = 0;
  Index failed = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Prediction& p = pred[i];
    const bool ok = p.status == PredictionStatus::Ok;
    out << i + 1 << ',' << (ok ? std::string(1, to_char(p.label)) : std::string()) << ','
        << (ok && std::isfinite(p.score) ? format_double(p.score) : std::string()) << ',' << status_name(p.status)
        << '\n';
    if (!ok) ++failed;
    if (ok && p.label == ClassLabel::X) ++predicted_x;
  }
  if (!out) throw Error(ErrorKind::DataError, "write to " + cfg.predictions + " failed");
  return with_header("predict", cfg,
                     {{"method", to_string(m.method)},
                      {"rows", test.size()},
                      {"predicted_x", predicted_x},
                      {"predicted_y", test.size() - predicted_x - failed},
                      {"failed", failed},
                      {"predictions", cfg.predictions}});
}

json cmd_evaluate(const RunConfig& cfg) {
  const StoredModel m = model_from_json(read_json_file(cfg.model_file));
  const DataSet test = read_csv_file(cfg.test);
  json j = evaluate_model(m, test, cfg);
  if (!cfg.plot.empty()) write_beta_plot(cfg.plot, m, cfg);
  return with_header("evaluate", cfg, j);
}

json cmd_cv(const RunConfig& cfg) {
  const DataSet train = read_csv_file(cfg.train);
  const StoredModel m = fit_model(train, cfg);
  return with_header("cv", cfg,
                     {{"method", to_string(m.method)}, {"selected", selection_json(m)}, {"tuning", m.tuning}});
}

json cmd_bench(const RunConfig& cfg) {
  json runs = json::array();
  json oracles = json::array();
  json aggregate = json::array();
  for (const std::string& model_name : cfg.models) {
    const ModelId id = parse_model_id(model_name);
    for (Index p : cfg.dims) {
      const ExpectedRisk r = bayes_expected_risk(oracle_of(id, p), cfg.risk_integration());
      oracles.push_back({{"model", to_string(id)}, {"p", p}, {"expected_bayes_risk", expected_risk_json(r)}});
      std::map<std::string, std::vector<double>> rates;
      for (Index rep = 0; rep < cfg.replications; ++rep) {
        RunConfig run = cfg;
        run.model = std::string(to_string(id));
        run.p = p;
        run.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        run.oracle.clear();
        const ModelSpec spec = run.model_spec();
        const DataSet train = sample_dataset(spec);
        const DataSet test = sample_test_dataset(spec, cfg.test_n1, cfg.test_n2);
        for (const std::string& method : cfg.methods) {
          run.method = method;
          const StoredModel m = fit_model(train, run);
          json e = evaluate_model(m, test, run, {false, false});
          rates[method].push_back(e["misclassification_rate"].get<double>());
          json row = {{"model", to_string(id)}, {"p", p}, {"seed", run.seed}};
          row.update(e);
          row.erase("tuning");
          runs.push_back(row);
          std::cerr << to_string(id) << " p=" << p << " seed=" << run.seed << ' ' << method
                    << " error=" << e["misclassification_rate"].get<double>() << '\n';
        }
      }
      json cell = {{"model", to_string(id)}, {"p", p}, {"bayes_risk", r.value}};
      for (const auto& [method, v] : rates) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        cell[method] = {{"median", median(v)}, {"mean", mean}, {"runs", v.size()}};
      }
      if (rates.count("dlpd") && rates.count("lpd")) {
        double gap = 0.0;
        for (std::size_t i = 0; i < rates["dlpd"].size(); ++i) gap += rates["lpd"][i] - rates["dlpd"][i];
        cell["mean_lpd_minus_dlpd"] = gap / static_cast<double>(rates["dlpd"].size());
      }
      aggregate.push_back(cell);
    }
  }

  std::cerr << "\nmodel      p   R        ";
  for (const auto& method : cfg.methods) std::cerr << std::setw(10) << method;
  std::cerr << '\n';
  for (const auto& cell : aggregate) {
    std::cerr << std::left << std::setw(6) << cell["model"].get<std::string>() << std::right << std::setw(5)
              << cell["p"].get<Index>() << "   " << std::fixed << std::setprecision(4)
              << cell["bayes_risk"].get<double>() << "  ";
    for (const auto& method : cfg.methods) std::cerr << std::setw(10) << cell[method]["median"].get<double>();
    std::cerr << std::defaultfloat << '\n';
  }
  return with_header("bench", cfg,
                     {{"replications", cfg.replications},
                      {"methods", cfg.methods},
                      {"oracles", oracles},
                      {"runs", runs},
                      {"aggregate", aggregate}});
}

}  // namespace dlpd::cli
