#pragma once

// CSV emission with the fixed header `x,analytic,montecarlo,stderr`.
// Numbers use 17 significant digits in scientific notation, which
// round-trips every finite double exactly.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ehrelay/analytic.hpp"
#include "ehrelay/errors.hpp"
#include "ehrelay/experiments.hpp"
#include "ehrelay/montecarlo.hpp"

namespace ehrelay::io {

inline constexpr std::string_view kCsvHeader = "x,analytic,montecarlo,stderr";

inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

struct CsvRow {
  double x = 0.0;
  std::optional<double> analytic;
  std::optional<double> montecarlo;
  std::optional<double> std_error;
};

namespace detail {

inline void write_line(std::ostream& out, const CsvRow& row) {
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  out << format_number(row.x) << ',' << cell(row.analytic) << ',' << cell(row.montecarlo) << ','
      << cell(row.std_error) << '\n';
}

inline void check_sink(const std::ostream& out) {
  if (!out) throw IoError("failed writing CSV output");
}

}  // namespace detail

inline void emit_csv(const experiments::SweepResult& result, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& row : result.rows) {
    std::optional<double> analytic;
    if (!row.error) analytic = row.analytic;
    detail::write_line(out, {row.x, analytic, row.empirical, row.std_error});
  }
  out.flush();
  detail::check_sink(out);
}

/// One-row CSV; `x` is whatever the command sweeps or fixes (split or SNR).
inline void emit_csv(const analytic::OutagePoint& point, double x, std::ostream& out,
                     const std::optional<montecarlo::OutageEstimate>& estimate = std::nullopt) {
  out << kCsvHeader << '\n';
  CsvRow row{x, point.outage, std::nullopt, std::nullopt};
  if (estimate) {
    row.montecarlo = estimate->p_hat;
    row.std_error = estimate->std_error;
  }
  detail::write_line(out, row);
  out.flush();
  detail::check_sink(out);
}

inline std::optional<double> parse_cell(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ParseError("bad CSV number '" + std::string(text) + "'");
  }
  return value;
}

/// Reads back a document produced by emit_csv.
inline std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("missing CSV header");
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      cells.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    cells.push_back(rest);
    if (cells.size() != 4) throw ParseError("CSV line " + std::to_string(line_no) + ": expected 4 cells");
    const auto x = parse_cell(cells[0]);
    if (!x) throw ParseError("CSV line " + std::to_string(line_no) + ": empty x");
    rows.push_back({*x, parse_cell(cells[1]), parse_cell(cells[2]), parse_cell(cells[3])});
  }
  return rows;
}

}  // namespace ehrelay::io
