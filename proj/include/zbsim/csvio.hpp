#pragma once

// Strict CSV tables for the numeric artifacts: one header line, comma
// separation, no quoting/escaping (cell content never contains commas).
// Floats are written with %.16e so a round-trip preserves every bit.

#include <stdexcept>
#include <string>
#include <vector>

namespace zbsim::csv {

struct CsvError : std::runtime_error {
  explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// %.16e rendering (17 significant digits).
std::string fmt(double v);

void write_table(const std::string& path, const Table& t);
Table read_table(const std::string& path);

// Cell-by-cell comparison. Cells parsing as finite doubles on both sides
// compare within rel_tol (relative to the larger magnitude, falling back to
// absolute below 1); anything else must match exactly. Returns one message
// per mismatch (empty = tables agree), capped at 20 entries.
std::vector<std::string> compare_tables(const Table& a, const Table& b,
                                        double rel_tol);

} // namespace zbsim::csv
