#include "dlpd/dataset_io.hpp"

#include "dlpd/simulation.hpp"
#include "doctest.h"

#include <sstream>

using namespace dlpd;

namespace {

std::string data_error_message(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in, "in.csv");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DataError);
    return e.what();
  }
  FAIL("no error raised");
  return {};
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  ModelSpec spec;
  spec.id = ModelId::M4;
  spec.p = 22;
  spec.n1 = 7;
  spec.n2 = 9;
  spec.seed = RngSeed{5};
  const DataSet data = sample_dataset(spec);
  std::stringstream buf;
  write_csv(buf, data);
  const DataSet back = read_csv(buf);
  REQUIRE(back.size() == data.size());
  REQUIRE(back.feature_dim() == 22);
  REQUIRE(back.covariate_dim() == 2);
  CHECK(back.labels() == data.labels());
  CHECK(back.features() == data.features());
  CHECK(back.covariates() == data.covariates());
}

TEST_CASE("csv header and layout") {
  Matrix x(2, 2);
  x << 1.5, -2.0, 0.1, 3.0;
  Matrix u(2, 1);
  u << 0.25, 0.75;
  const DataSet data(x, u, {ClassLabel::Y, ClassLabel::X});
  std::ostringstream out;
  write_csv(out, data);
  CHECK(out.str() ==
        "label,u1,x1,x2\n"
        "Y,0.25,1.5,-2\n"
        "X,0.75,0.10000000000000001,3\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("csv reader tolerates blank lines and whitespace") {
  std::istringstream in("label, u1 ,x1\r\n\nX, 0.5, 1\n  \nY,0.25,2\n");
  const DataSet data = read_csv(in);
  CHECK(data.size() == 2);
  CHECK(data.count(ClassLabel::X) == 1);
  CHECK(data.features()(1, 0) == 2.0);
}

TEST_CASE("csv errors name the line") {
  CHECK(data_error_message("") == "in.csv:1: missing header");
  CHECK(data_error_message("lab,u1,x1\n").find("in.csv:1:") == 0);
  CHECK(data_error_message("label,x1,u1\nX,1,2\n").find("in.csv:1: unexpected column 'u1'") == 0);
  CHECK(data_error_message("label,u1,x1\nX,0.5,1\nY,0.5\n") ==
        "in.csv:3: expected 3 columns, found 2");
  CHECK(data_error_message("label,u1,x1\nX,0.5,1\n\nZ,0.5,1\n") ==
        "in.csv:4: label must be X or Y, got 'Z'");
  CHECK(data_error_message("label,u1,x1\nX,0.5,abc\n") ==
        "in.csv:2: column 3: 'abc' is not a number");
  CHECK(data_error_message("label,u1,x1\nX,0.5,1.5e\n").find("in.csv:2:") == 0);
  CHECK(data_error_message("label,u1,x1\n").find("no data rows") != std::string::npos);
  CHECK_THROWS_AS(read_csv_file("/nonexistent/file.csv"), Error);
}
