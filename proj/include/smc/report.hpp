#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "smc/error.hpp"
#include "smc/format.hpp"

namespace smc {

enum class CsvKind { Champions, Bootstrap };

inline constexpr std::string_view kChampionsHeader = "leaves,df,loglik,c_lo,c_hi";
inline constexpr std::string_view kBootstrapHeader = "pair_index,smaller_leaves,larger_leaves,n_j,q1,median,q3";

struct CsvTable {
  CsvKind kind = CsvKind::Champions;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline double parse_field(const std::string& field, std::size_t line) {
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (field.empty() || used != field.size())
    throw DomainError("malformed number '" + field + "' on line " + std::to_string(line));
  return v;
}

}  // namespace detail

/// Reads a champions or bootstrap CSV written by this tool. The kind is
/// taken from the header line.
inline CsvTable parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  CsvTable table;
  std::size_t columns = 0;
  if (line == kChampionsHeader) {
    table.kind = CsvKind::Champions;
    columns = 5;
  } else if (line == kBootstrapHeader) {
    table.kind = CsvKind::Bootstrap;
    columns = 7;
  } else {
    throw DomainError("unrecognized CSV header '" + line + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(detail::parse_field(field, lineno));
    if (!line.empty() && line.back() == ',') row.push_back(detail::parse_field("", lineno));
    if (row.size() != columns)
      throw DomainError("expected " + std::to_string(columns) + " fields on line " + std::to_string(lineno));
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace detail {

struct Frame {
  double width = 640, height = 420, left = 70, right = 20, top = 30, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void widen(double& lo, double& hi) {
  if (!(lo < hi)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
}

inline std::string open_svg(const Frame& f, std::string_view title, std::string_view xlabel,
                            std::string_view ylabel) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.width) + "\" height=\"" +
                  num(f.height) + "\" viewBox=\"0 0 " + num(f.width) + ' ' + num(f.height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(f.width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" +
       std::string(title) + "</text>\n";
  const double xa = f.left, ya = f.height - f.bottom;
  s += "<line class=\"axis\" x1=\"" + num(xa) + "\" y1=\"" + num(ya) + "\" x2=\"" + num(f.width - f.right) +
       "\" y2=\"" + num(ya) + "\" stroke=\"black\"/>\n";
  s += "<line class=\"axis\" x1=\"" + num(xa) + "\" y1=\"" + num(ya) + "\" x2=\"" + num(xa) + "\" y2=\"" +
       num(f.top) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num((f.left + f.width - f.right) / 2) + "\" y=\"" + num(f.height - 12) +
       "\" text-anchor=\"middle\" font-size=\"12\">" + std::string(xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((f.top + ya) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" " +
       "transform=\"rotate(-90 16 " + num((f.top + ya) / 2) + ")\">" + std::string(ylabel) + "</text>\n";
  // Axis extremes as tick labels.
  s += "<text x=\"" + num(xa) + "\" y=\"" + num(ya + 16) + "\" font-size=\"10\" text-anchor=\"middle\">" +
       format_number(f.x0) + "</text>\n";
  s += "<text x=\"" + num(f.width - f.right) + "\" y=\"" + num(ya + 16) +
       "\" font-size=\"10\" text-anchor=\"middle\">" + format_number(f.x1) + "</text>\n";
  s += "<text x=\"" + num(xa - 4) + "\" y=\"" + num(ya) + "\" font-size=\"10\" text-anchor=\"end\">" +
       format_number(f.y0) + "</text>\n";
  s += "<text x=\"" + num(xa - 4) + "\" y=\"" + num(f.top + 4) + "\" font-size=\"10\" text-anchor=\"end\">" +
       format_number(f.y1) + "</text>\n";
  return s;
}

}  // namespace detail

/// Log-likelihood against number of leaves: one polyline through the
/// champions and one marker per champion.
inline std::string champions_svg(const CsvTable& table) {
  detail::Frame f;
  auto rows = table.rows;
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  if (!rows.empty()) {
    f.x0 = f.x1 = rows.front()[0];
    f.y0 = f.y1 = rows.front()[2];
    for (const auto& r : rows) {
      f.x0 = std::min(f.x0, r[0]);
      f.x1 = std::max(f.x1, r[0]);
      f.y0 = std::min(f.y0, r[2]);
      f.y1 = std::max(f.y1, r[2]);
    }
  }
  detail::widen(f.x0, f.x1);
  detail::widen(f.y0, f.y1);
  std::string s = detail::open_svg(f, "Log-likelihood of the champion trees", "leaves", "log-likelihood");
  if (!rows.empty()) {
    s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < rows.size(); ++i)
      s += (i ? " " : "") + detail::num(f.px(rows[i][0])) + ',' + detail::num(f.py(rows[i][2]));
    s += "\"/>\n";
    for (const auto& r : rows)
      s += "<circle cx=\"" + detail::num(f.px(r[0])) + "\" cy=\"" + detail::num(f.py(r[2])) +
           "\" r=\"3\" fill=\"steelblue\"><title>" + format_number(r[0]) + " leaves, df " +
           format_number(r[1]) + "</title></circle>\n";
  }
  return s + "</svg>\n";
}

/// One box (Q1 to Q3, with a median bar) per (pair, size), pairs laid out
/// left to right and sizes within each pair.
inline std::string bootstrap_svg(const CsvTable& table) {
  detail::Frame f;
  f.width = std::max(640.0, 90.0 + 14.0 * static_cast<double>(table.rows.size()));
  auto rows = table.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[3] < b[3]);
  });
  if (!rows.empty()) {
    f.y0 = f.y1 = rows.front()[4];
    for (const auto& r : rows) {
      f.y0 = std::min({f.y0, r[4], r[5], r[6]});
      f.y1 = std::max({f.y1, r[4], r[5], r[6]});
    }
  }
  // slot index per row, with a one-slot gap between pairs
  std::vector<double> slot(rows.size());
  double next = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i][0] != rows[i - 1][0]) next += 1.0;
    slot[i] = next;
    next += 1.0;
  }
  f.x0 = -1.0;
  f.x1 = rows.empty() ? 1.0 : next;
  detail::widen(f.y0, f.y1);
  std::string s = detail::open_svg(f, "Bootstrap gains per champion pair", "pair / resample size",
                                   "gain per symbol");
  const double half = std::max(1.5, 0.35 * (f.px(1.0) - f.px(0.0)));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double cx = f.px(slot[i]);
    const double top = f.py(r[6]), bottom = f.py(r[4]);
    s += "<rect class=\"box\" x=\"" + detail::num(cx - half) + "\" y=\"" + detail::num(top) + "\" width=\"" +
         detail::num(2 * half) + "\" height=\"" + detail::num(std::max(bottom - top, 0.5)) +
         "\" fill=\"#cde\" stroke=\"black\"><title>pair " + format_number(r[0]) + " (" + format_number(r[1]) +
         " vs " + format_number(r[2]) + " leaves), n=" + format_number(r[3]) + "</title></rect>\n";
    s += "<line class=\"median\" x1=\"" + detail::num(cx - half) + "\" y1=\"" + detail::num(f.py(r[5])) +
         "\" x2=\"" + detail::num(cx + half) + "\" y2=\"" + detail::num(f.py(r[5])) +
         "\" stroke=\"darkred\" stroke-width=\"2\"/>\n";
  }
  return s + "</svg>\n";
}

inline std::string render_svg(const CsvTable& table) {
  return table.kind == CsvKind::Champions ? champions_svg(table) : bootstrap_svg(table);
}

}  // namespace smc
