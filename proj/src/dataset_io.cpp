#include "dlpd/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace dlpd {

namespace {

[[noreturn]] void data_error(const std::string& source, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  throw Error(ErrorKind::DataError, os.str());
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const DataSet& data) {
  out << "label";
  for (Index j = 0; j < data.covariate_dim(); ++j) out << ",u" << j + 1;
  for (Index j = 0; j < data.feature_dim(); ++j) out << ",x" << j + 1;
  out << '\n';
  for (Index i = 0; i < data.size(); ++i) {
    out << to_char(data.label(i));
    for (Index j = 0; j < data.covariate_dim(); ++j) out << ',' << format_double(data.covariates()(i, j));
    for (Index j = 0; j < data.feature_dim(); ++j) out << ',' << format_double(data.features()(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const DataSet& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::DataError, "cannot open " + path + " for writing");
  write_csv(out, data);
  if (!out) throw Error(ErrorKind::DataError, "write to " + path + " failed");
}

DataSet read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) data_error(source, line_no, "missing header");
  const auto header = split(trim(line));
  if (trim(header.front()) != "label") data_error(source, line_no, "first column must be 'label'");
  Index d = 0;
  Index p = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string_view name = trim(header[c]);
    const std::string expect_u = "u" + std::to_string(d + 1);
    const std::string expect_x = "x" + std::to_string(p + 1);
    if (p == 0 && name == expect_u) {
      ++d;
    } else if (name == expect_x) {
      ++p;
    } else {
      data_error(source, line_no, "unexpected column '" + std::string(name) + "'");
    }
  }
  if (d == 0 || p == 0) data_error(source, line_no, "need at least one u and one x column");

  std::vector<double> values;
  std::vector<ClassLabel> labels;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto cells = split(row);
    if (static_cast<Index>(cells.size()) != 1 + d + p) {
      data_error(source, line_no,
                 "expected " + std::to_string(1 + d + p) + " columns, found " + std::to_string(cells.size()));
    }
    const std::string_view lab = trim(cells[0]);
    if (lab == "X") {
      labels.push_back(ClassLabel::X);
    } else if (lab == "Y") {
      labels.push_back(ClassLabel::Y);
    } else {
      data_error(source, line_no, "label must be X or Y, got '" + std::string(lab) + "'");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string_view cell = trim(cells[c]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
        data_error(source, line_no,
                   "column " + std::to_string(c + 1) + ": '" + std::string(cell) + "' is not a number");
      }
      values.push_back(v);
    }
  }
  const auto n = static_cast<Index>(labels.size());
  if (n == 0) data_error(source, line_no, "no data rows");
  Matrix u(n, d);
  Matrix x(n, p);
  for (Index i = 0; i < n; ++i) {
    const double* row = values.data() + i * (d + p);
    for (Index j = 0; j < d; ++j) u(i, j) = row[j];
    for (Index j = 0; j < p; ++j) x(i, j) = row[d + j];
  }
  try {
    return DataSet(std::move(x), std::move(u), std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::DataError, source + ": " + e.what());
  }
}

DataSet read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::DataError, "cannot open " + path);
  return read_csv(in, path);
}

}  // namespace dlpd
