#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mfcn {

/// Shortest round-trip decimal form of x ("%.17g" trimmed). All CSV output
/// goes through this so reruns are byte-identical.
std::string format_double(double x);

/// Strict double parse; the whole token must be consumed.
bool parse_double(const std::string& token, double& out);

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  Eigen::MatrixXd values;
};

/// Parses a comma-separated numeric table. Rows must have uniform width;
/// violations raise ParseError naming the 1-based line. When the first row
/// contains any non-numeric cell it is treated as a header.
CsvTable read_csv(const std::string& path, bool allow_header);

void write_csv(const Eigen::MatrixXd& values, const std::string& path,
               const std::vector<std::string>& header = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mfcn
