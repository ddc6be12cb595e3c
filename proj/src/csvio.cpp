#include "zbsim/csvio.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace zbsim::csv {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double* v) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, *v);
  return ec == std::errc() && p == e && std::isfinite(*v);
}

} // namespace

void write_table(const std::string& path, const Table& t) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw CsvError("cannot open for writing: " + path);
  for (size_t c = 0; c < t.columns.size(); ++c)
    f << (c ? "," : "") << t.columns[c];
  f << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw CsvError("row width mismatch while writing " + path);
    for (size_t c = 0; c < row.size(); ++c) f << (c ? "," : "") << row[c];
    f << '\n';
  }
  if (!f.good()) throw CsvError("write failed: " + path);
}

Table read_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CsvError("cannot open: " + path);
  Table t;
  std::string line;
  if (!std::getline(f, line)) throw CsvError("empty file: " + path);
  t.columns = split_line(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.columns.size())
      throw CsvError("row width mismatch in " + path);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::vector<std::string> compare_tables(const Table& a, const Table& b,
                                        double rel_tol) {
  std::vector<std::string> diffs;
  auto add = [&](const std::string& m) {
    if (diffs.size() < 20) diffs.push_back(m);
  };
  if (a.columns != b.columns) {
    add("header mismatch");
    return diffs;
  }
  if (a.rows.size() != b.rows.size()) {
    add("row count " + std::to_string(a.rows.size()) + " vs " +
        std::to_string(b.rows.size()));
    return diffs;
  }
  for (size_t r = 0; r < a.rows.size(); ++r) {
    for (size_t c = 0; c < a.columns.size(); ++c) {
      const std::string& x = a.rows[r][c];
      const std::string& y = b.rows[r][c];
      double dx, dy;
      if (parse_double(x, &dx) && parse_double(y, &dy)) {
        const double scale = std::max({std::abs(dx), std::abs(dy), 1.0});
        if (std::abs(dx - dy) > rel_tol * scale)
          add("row " + std::to_string(r) + " col " + a.columns[c] + ": " + x +
              " vs " + y);
      } else if (x != y) {
        add("row " + std::to_string(r) + " col " + a.columns[c] + ": '" + x +
            "' vs '" + y + "'");
      }
    }
  }
  return diffs;
}

} // namespace zbsim::csv
