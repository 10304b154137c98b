#include "mfcn/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfcn/errors.hpp"

namespace mfcn {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  // Try shorter forms that still round-trip, so output stays readable.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, x);
    double back = 0.0;
    auto [p, ec] = std::from_chars(probe, probe + std::string_view(probe).size(), back);
    (void)p;
    if (ec == std::errc() && back == x) return probe;
  }
  return buf;
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  if (begin == end) return false;
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

static std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

CsvTable read_csv(const std::string& path, bool allow_header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);

  std::vector<std::vector<double>> rows;
  CsvTable table;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parse_double(cells[i], row[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (allow_header && rows.empty() && table.header.empty()) {
        for (auto& c : cells) {
          while (!c.empty() && (c.back() == ' ' || c.back() == '\r')) c.pop_back();
          while (!c.empty() && c.front() == ' ') c.erase(c.begin());
        }
        table.header = cells;
        width = cells.size();
        continue;
      }
      throw ParseError(path + ": non-numeric cell at line " + std::to_string(line_no));
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError(path + ": ragged row at line " + std::to_string(line_no) +
                       " (expected " + std::to_string(width) + " cells, got " +
                       std::to_string(row.size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

void write_csv(const Eigen::MatrixXd& values, const std::string& path,
               const std::vector<std::string>& header) {
  std::ostringstream out;
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      out << header[i];
    }
    out << '\n';
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

}  // namespace mfcn
