#pragma once

#include "model_json.hpp"
#include "run_config.hpp"

#include <json.hpp>

#include <optional>

namespace dlpd::cli {

// Tunes and fits `cfg.method` on `train`.
StoredModel fit_model(const DataSet& train, const RunConfig& cfg);

struct EvaluationOptions {
  bool conditional_risks = true;  // Bayes and plug-in risk on a u-grid
  bool expected_risk = true;      // oracle E_U risk
};

// Error counts and rates of `model` on `test`, plus oracle risks when the
// model carries an oracle.
nlohmann::json evaluate_model(const StoredModel& model, const DataSet& test, const RunConfig& cfg,
                              const EvaluationOptions& opts = {});

nlohmann::json expected_risk_json(const ExpectedRisk& r);

// Tidy CSV rows (u, coordinate, value, series) of beta_hat(u) and, with an
// oracle, the true direction.
void write_beta_plot(const std::string& path, const StoredModel& model, const RunConfig& cfg);

nlohmann::json cmd_simulate(const RunConfig& cfg);
nlohmann::json cmd_fit(const RunConfig& cfg);
nlohmann::json cmd_predict(const RunConfig& cfg);
nlohmann::json cmd_evaluate(const RunConfig& cfg);
nlohmann::json cmd_cv(const RunConfig& cfg);
nlohmann::json cmd_bench(const RunConfig& cfg);

}  // namespace dlpd::cli
