#pragma once

// Command-level operations shared by the CLI and the tests.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acs/gallery.hpp"
#include "acs/obstruction.hpp"
#include "acs/report_io.hpp"
#include "acs/scan.hpp"
#include "acs/structure_file.hpp"

namespace acs {

enum class Format { text, json };

namespace exit_code {
inline constexpr int consistent = 0;
inline constexpr int operational_error = 1;
inline constexpr int invalid_acs = 2;
inline constexpr int ledger_anomaly = 3;
inline constexpr int selftest_failure = 4;
}  // namespace exit_code

inline int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::consistent: return exit_code::consistent;
    case Verdict::invalid_acs: return exit_code::invalid_acs;
    case Verdict::ledger_anomaly: return exit_code::ledger_anomaly;
  }
  return exit_code::operational_error;
}

/// "gallery:<name>" or a structure-file path.
inline StructureFile resolve_structure(const std::string& source) {
  if (source.rfind("gallery:", 0) == 0) return gallery(source.substr(8));
  return load_structure(source);
}

/// "v1,v2,..." as doubles; every field must parse completely.
inline std::vector<double> parse_point(const std::string& text) {
  std::vector<double> p;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string field = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      p.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad coordinate '" + field + "' in point '" + text + "'");
    }
    start = comma + 1;
  }
  return p;
}

struct CheckResult {
  ObstructionReport report;
  std::string output;
  int exit_code = 0;
};

inline ObstructionReport report_for(const StructureFile& s, const std::vector<double>& point, const Tolerances& tol) {
  if (point.size() != s.chart.dim()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has dimension " +
                                std::to_string(s.chart.dim()));
  }
  return identity_report(s.j, s.metric, point, tol);
}

inline CheckResult run_check(const StructureFile& s, const std::vector<double>& point, const Tolerances& tol = {},
                             Format format = Format::text) {
  CheckResult r;
  r.report = report_for(s, point, tol);
  r.output = format == Format::json ? to_json(r.report).dump(2) + '\n' : to_text(r.report);
  r.exit_code = exit_code_for(r.report.verdict);
  return r;
}

inline CheckResult run_verify_derivation(const StructureFile& s, const std::vector<double>& point,
                                         const Tolerances& tol = {}, Format format = Format::text) {
  CheckResult r;
  r.report = report_for(s, point, tol);
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["point"] = r.report.point;
    j["ledger"] = ledger_json(r.report.ledger);
    j["contraction"] = r.report.contraction;
    j["ledger_residual"] = r.report.ledger_residual;
    nlohmann::ordered_json boxed;
    for (const auto& [name, value] : r.report.boxed_residuals) boxed[name] = value;
    j["boxed_residuals"] = boxed;
    j["l_j_formula"] = r.report.l_j_formula;
    j["identity_residual_final"] = r.report.identity_residual_final;
    j["double_trace"] = r.report.double_trace;
    j["identity_residual_LJ1"] = r.report.identity_residual_LJ1;
    j["verdict"] = to_string(r.report.verdict);
    normalize_zeros(j);
    r.output = j.dump(2) + '\n';
  } else {
    r.output = derivation_text(r.report);
  }
  r.exit_code = exit_code_for(r.report.verdict);
  return r;
}

/// Scans, writes the CSV to `csv_path` and returns the summary.
inline ScanSummary run_scan(const StructureFile& s, const GridSpec& grid, const std::string& csv_path,
                            const Tolerances& tol = {}) {
  const auto rows = scan_rows(s, grid, tol);
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
  write_scan_csv(out, s.chart, rows);
  if (!out) throw std::runtime_error("failed writing '" + csv_path + "'");
  return summarize(rows);
}

}  // namespace acs
