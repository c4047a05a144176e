#pragma once

// Grid scans: one report per grid point, rows in row-major order (last axis
// fastest).

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acs/obstruction.hpp"
#include "acs/report_io.hpp"
#include "acs/structure_file.hpp"

namespace acs {

struct GridAxis {
  double min = 0;
  double max = 0;
  std::size_t count = 1;

  double at(std::size_t i) const {
    if (count == 1) return min;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

struct GridSpec {
  std::vector<GridAxis> axes;

  std::size_t total() const {
    std::size_t t = 1;
    for (const auto& a : axes) t *= a.count;
    return t;
  }

  /// Coordinates of the row-major `index`-th point.
  std::vector<double> point(std::size_t index) const {
    std::vector<double> p(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      p[k] = axes[k].at(index % axes[k].count);
      index /= axes[k].count;
    }
    return p;
  }
};

/// "a:b:n,a:b:n,..." with one triple per axis.
inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string axis = text.substr(start, comma - start);
    const auto c1 = axis.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : axis.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("grid axis '" + axis + "' is not min:max:count");
    GridAxis a;
    try {
      std::size_t used = 0;
      const std::string smin = axis.substr(0, c1), smax = axis.substr(c1 + 1, c2 - c1 - 1),
                        scount = axis.substr(c2 + 1);
      a.min = std::stod(smin, &used);
      if (used != smin.size()) throw std::invalid_argument(smin);
      a.max = std::stod(smax, &used);
      if (used != smax.size()) throw std::invalid_argument(smax);
      const long cnt = std::stol(scount, &used);
      if (used != scount.size() || cnt < 1) throw std::invalid_argument(scount);
      a.count = static_cast<std::size_t>(cnt);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid axis '" + axis + "' is not min:max:count with count >= 1");
    }
    if (!(a.min <= a.max)) throw std::invalid_argument("grid axis '" + axis + "' has min > max");
    g.axes.push_back(a);
    start = comma + 1;
  }
  return g;
}

struct ScanRow {
  std::vector<double> point;
  std::optional<ObstructionReport> report;  // empty when evaluation failed
  std::string error;
};

struct ScanSummary {
  std::size_t rows = 0;
  std::size_t failed = 0;
  double max_abs_l_j = 0;
  std::vector<double> argmax_l_j;  // empty if no row succeeded
  double max_abs_contraction = 0;
  double max_n_max_abs = 0;
};

/// Evaluates every grid point; a failing point becomes a flagged row.
inline std::vector<ScanRow> scan_rows(const StructureFile& s, const GridSpec& grid, const Tolerances& tol = {}) {
  if (grid.axes.size() != s.chart.dim()) {
    throw std::invalid_argument("grid has " + std::to_string(grid.axes.size()) + " axes, chart has dimension " +
                                std::to_string(s.chart.dim()));
  }
  std::vector<ScanRow> rows;
  rows.reserve(grid.total());
  for (std::size_t idx = 0; idx < grid.total(); ++idx) {
    ScanRow row;
    row.point = grid.point(idx);
    try {
      row.report = identity_report(s.j, s.metric, row.point, tol);
    } catch (const std::exception& err) {
      row.error = err.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ScanSummary summarize(const std::vector<ScanRow>& rows) {
  ScanSummary sum;
  sum.rows = rows.size();
  bool have = false;
  for (const auto& row : rows) {
    if (!row.report) {
      ++sum.failed;
      continue;
    }
    const auto& r = *row.report;
    if (!have || std::abs(r.l_j_formula) > sum.max_abs_l_j) {
      sum.max_abs_l_j = std::abs(r.l_j_formula);
      sum.argmax_l_j = row.point;
      have = true;
    }
    sum.max_abs_contraction = std::max(sum.max_abs_contraction, std::abs(r.contraction));
    sum.max_n_max_abs = std::max(sum.max_n_max_abs, r.n_max_abs);
  }
  return sum;
}

inline void write_scan_csv(std::ostream& out, const ChartSpec& chart, const std::vector<ScanRow>& rows) {
  for (const auto& v : chart.var_names()) out << csv_quote(v) << ',';
  out << "status,n_max_abs,l_j_formula,contraction,identity_residual_final,message\n";
  for (const auto& row : rows) {
    for (double v : row.point) out << format_full(v) << ',';
    if (row.report) {
      const auto& r = *row.report;
      out << "ok," << format_full(r.n_max_abs) << ',' << format_full(r.l_j_formula) << ','
          << format_full(r.contraction) << ',' << format_full(r.identity_residual_final) << ",\n";
    } else {
      out << "error,,,,," << csv_quote(row.error) << '\n';
    }
  }
}

inline std::string summary_text(const ScanSummary& s) {
  std::string out = "rows: " + std::to_string(s.rows) + "\nfailed: " + std::to_string(s.failed) +
                    "\nmax_abs_l_j: " + format_full(s.max_abs_l_j) + "\nargmax_l_j:";
  for (double v : s.argmax_l_j) out += ' ' + format_full(v);
  out += "\nmax_abs_contraction: " + format_full(s.max_abs_contraction) +
         "\nmax_n_max_abs: " + format_full(s.max_n_max_abs) + '\n';
  return out;
}

}  // namespace acs
