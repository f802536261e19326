#pragma once

#include "run_config.hpp"

#include "dlpd/baselines.hpp"
#include "dlpd/classifier.hpp"
#include "dlpd/model_selection.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace dlpd::cli {

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kReportVersion = 1;

/// A fitted rule plus how it was tuned. The training data travel with the
/// model: DLPD refits locally at every covariate point and KNN needs them
/// anyway.
struct StoredModel {
  StoredModel(Method m, DataSet data) : method(m), training(std::move(data)) {}

  Method method = Method::Dlpd;
  DataSet training;
  KernelSpec kernel = KernelSpec::epanechnikov();
  std::optional<Bandwidth> hx;  // DLPD only
  std::optional<Bandwidth> hy;
  double lambda = 0.0;          // DLPD and LPD
  Index k = 1;                  // KNN
  std::optional<std::string> oracle;
  nlohmann::json tuning = nlohmann::json::object();

  DlpdModel dlpd() const;
  StaticLpdModel lpd() const;
};

nlohmann::json dataset_to_json(const DataSet& data);
DataSet dataset_from_json(const nlohmann::json& j);

nlohmann::json bandwidth_to_json(const Bandwidth& h);
nlohmann::json tuning_to_json(const TuningResult& t);

nlohmann::json model_to_json(const StoredModel& model);
StoredModel model_from_json(const nlohmann::json& j);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace dlpd::cli
