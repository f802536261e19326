#include "model_json.hpp"

#include <fstream>

namespace dlpd::cli {

namespace {

[[noreturn]] void bad_model(const std::string& msg) {
  throw Error(ErrorKind::DataError, "model file: " + msg);
}

std::vector<double> row_of(const Matrix& m, Index i) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(j)] = m(i, j);
  return out;
}

Matrix matrix_from(const nlohmann::json& rows, Index cols, const char* what) {
  if (!rows.is_array()) bad_model(std::string(what) + " must be an array of rows");
  Matrix m(static_cast<Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || static_cast<Index>(rows[i].size()) != cols) {
      bad_model(std::string(what) + " row " + std::to_string(i + 1) + " has the wrong length");
    }
    for (Index j = 0; j < cols; ++j) m(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace

nlohmann::json dataset_to_json(const DataSet& data) {
  std::string labels;
  nlohmann::json u = nlohmann::json::array();
  nlohmann::json x = nlohmann::json::array();
  for (Index i = 0; i < data.size(); ++i) {
    labels.push_back(to_char(data.label(i)));
    u.push_back(row_of(data.covariates(), i));
    x.push_back(row_of(data.features(), i));
  }
  return {{"p", data.feature_dim()}, {"d", data.covariate_dim()}, {"labels", labels},
          {"covariates", u}, {"features", x}};
}

DataSet dataset_from_json(const nlohmann::json& j) {
  const auto p = j.at("p").get<Index>();
  const auto d = j.at("d").get<Index>();
  const auto text = j.at("labels").get<std::string>();
  std::vector<ClassLabel> labels;
  for (char c : text) {
    if (c == 'X') {
      labels.push_back(ClassLabel::X);
    } else if (c == 'Y') {
      labels.push_back(ClassLabel::Y);
    } else {
      bad_model(std::string("label '") + c + "' is not X or Y");
    }
  }
  Matrix u = matrix_from(j.at("covariates"), d, "covariates");
  Matrix x = matrix_from(j.at("features"), p, "features");
  if (u.rows() != static_cast<Index>(labels.size()) || x.rows() != u.rows()) {
    bad_model("labels, covariates and features differ in length");
  }
  return DataSet(std::move(x), std::move(u), std::move(labels));
}

nlohmann::json bandwidth_to_json(const Bandwidth& h) {
  return std::vector<double>(h.diag().data(), h.diag().data() + h.dim());
}

nlohmann::json tuning_to_json(const TuningResult& t) {
  return {{"multiplier_x", t.multiplier_x},
          {"multiplier_y", t.multiplier_y},
          {"bandwidth_scores_x", t.bandwidth_scores_x},
          {"bandwidth_scores_y", t.bandwidth_scores_y},
          {"lambda_grid", t.lambda_grid},
          {"lambda_scores", t.lambda_scores}};
}

DlpdModel StoredModel::dlpd() const {
  if (method != Method::Dlpd || !hx || !hy) throw Error(ErrorKind::InvalidArgument, "model is not a DLPD fit");
  return DlpdModel(training, *hx, *hy, kernel, lambda);
}

StaticLpdModel StoredModel::lpd() const {
  if (method != Method::Lpd) throw Error(ErrorKind::InvalidArgument, "model is not an LPD fit");
  return static_lpd_from_data(training, lambda);
}

nlohmann::json model_to_json(const StoredModel& m) {
  nlohmann::json j = {{"format", "dlpd-model"},
                      {"format_version", kModelFormatVersion},
                      {"method", to_string(m.method)},
                      {"tuning", m.tuning}};
  switch (m.method) {
    case Method::Dlpd:
      j["kernel"] = m.kernel.name();
      j["tgauss_cutoff"] = m.kernel.cutoff();
      j["hx"] = bandwidth_to_json(*m.hx);
      j["hy"] = bandwidth_to_json(*m.hy);
      j["lambda"] = m.lambda;
      break;
    case Method::Lpd:
      j["lambda"] = m.lambda;
      break;
    case Method::Knn:
      j["k"] = m.k;
      break;
  }
  j["oracle"] = m.oracle ? nlohmann::json(*m.oracle) : nlohmann::json(nullptr);
  j["training"] = dataset_to_json(m.training);
  return j;
}

StoredModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "dlpd-model") bad_model("not a dlpd model");
    if (j.value("format_version", 0) != kModelFormatVersion) bad_model("unsupported format_version");
    StoredModel m{parse_method(j.at("method").get<std::string>()), dataset_from_json(j.at("training"))};
    auto bw = [&](const char* key) {
      const auto v = j.at(key).get<std::vector<double>>();
      if (static_cast<Index>(v.size()) != m.training.covariate_dim()) {
        bad_model(std::string(key) + " has the wrong dimension");
      }
      return Bandwidth(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
    };
    switch (m.method) {
      case Method::Dlpd:
        m.kernel = KernelSpec::parse(j.at("kernel").get<std::string>(), j.value("tgauss_cutoff", 4.0));
        m.hx = bw("hx");
        m.hy = bw("hy");
        m.lambda = j.at("lambda").get<double>();
        break;
      case Method::Lpd:
        m.lambda = j.at("lambda").get<double>();
        break;
      case Method::Knn:
        m.k = j.at("k").get<Index>();
        if (m.k < 1 || m.k > m.training.size()) bad_model("k out of range");
        break;
    }
    if (j.contains("oracle") && j["oracle"].is_string()) m.oracle = j["oracle"].get<std::string>();
    m.tuning = j.value("tuning", nlohmann::json::object());
    return m;
  } catch (const nlohmann::json::exception& e) {
    bad_model(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DataError) throw;
    bad_model(e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::DataError, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::DataError, "write to " + path + " failed");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::DataError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::DataError, path + ": " + e.what());
  }
}

}  // namespace dlpd::cli
