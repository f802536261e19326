#pragma once

#include "dlpd/core.hpp"

#include <iosfwd>
#include <string>

namespace dlpd {

// CSV schema: header `label,u1..ud,x1..xp`, labels X or Y, numbers with 17
// significant digits. Read errors are Error(DataError) naming the line.
void write_csv(std::ostream& out, const DataSet& data);
void write_csv_file(const std::string& path, const DataSet& data);
DataSet read_csv(std::istream& in, const std::string& source = "<stream>");
DataSet read_csv_file(const std::string& path);

// Shortest-exact text for a double ("%.17g").
std::string format_double(double x);

}  // namespace dlpd
