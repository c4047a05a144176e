#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "acs/obstruction.hpp"

namespace acs {

/// 17 significant digits: round-trips every double.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// Rewrites -0 as 0 throughout a JSON value.
inline void normalize_zeros(nlohmann::ordered_json& j) {
  if (j.is_number_float() && j.get<double>() == 0.0) {
    j = 0.0;
  } else if (j.is_structured()) {
    for (auto& child : j) normalize_zeros(child);
  }
}

inline nlohmann::ordered_json ledger_json(const TermLedger& t) {
  nlohmann::ordered_json j;
  for (const auto& [name, value] : t.terms()) j[name] = value;
  j["first_quadratic"] = t.first_quadratic;
  j["total"] = t.total;
  return j;
}

inline nlohmann::ordered_json to_json(const ObstructionReport& r) {
  nlohmann::ordered_json j;
  j["point"] = r.point;
  j["j_squared_residual"] = r.j_squared_residual;
  j["n_max_abs"] = r.n_max_abs;
  j["l_j_formula"] = r.l_j_formula;
  j["contraction"] = r.contraction;
  j["double_trace"] = r.double_trace;
  j["identity_residual_LJ1"] = r.identity_residual_LJ1;
  j["identity_residual_final"] = r.identity_residual_final;
  j["ledger"] = ledger_json(r.ledger);
  nlohmann::ordered_json boxed;
  for (const auto& [name, value] : r.boxed_residuals) boxed[name] = value;
  j["boxed_residuals"] = boxed;
  j["verdict"] = to_string(r.verdict);
  j["ledger_residual"] = r.ledger_residual;
  j["contraction_magnitude"] = r.contraction_magnitude;
  j["formula_residual"] = r.formula_residual;
  j["double_trace_literal"] = r.double_trace_literal;
  j["field_condition"] = r.field_condition;
  j["normal_coordinates"] = r.normal_coordinates;
  normalize_zeros(j);
  return j;
}

inline std::string to_text(const ObstructionReport& r) {
  std::ostringstream out;
  out << "point:";
  for (double v : r.point) out << ' ' << format_full(v);
  out << '\n';
  auto line = [&](const char* key, double v) { out << key << ": " << format_full(v) << '\n'; };
  line("j_squared_residual", r.j_squared_residual);
  line("n_max_abs", r.n_max_abs);
  line("l_j_formula", r.l_j_formula);
  line("contraction", r.contraction);
  line("double_trace", r.double_trace);
  line("identity_residual_LJ1", r.identity_residual_LJ1);
  line("identity_residual_final", r.identity_residual_final);
  line("ledger_residual", r.ledger_residual);
  line("contraction_magnitude", r.contraction_magnitude);
  line("formula_residual", r.formula_residual);
  line("double_trace_literal", r.double_trace_literal);
  line("field_condition", r.field_condition);
  out << "normal_coordinates: " << (r.normal_coordinates ? "true" : "false") << '\n';
  out << "ledger:\n";
  for (const auto& [name, value] : r.ledger.terms()) out << "  " << name << ": " << format_full(value) << '\n';
  out << "  first_quadratic: " << format_full(r.ledger.first_quadratic) << '\n';
  out << "  total: " << format_full(r.ledger.total) << '\n';
  out << "boxed_residuals:\n";
  for (const auto& [name, value] : r.boxed_residuals) out << "  " << name << ": " << format_full(value) << '\n';
  out << "verdict: " << to_string(r.verdict) << '\n';
  return out.str();
}

/// Derivation-focused view: ledger terms, the cancellation claims and the
/// final reduction, in the order the expansion is read.
inline std::string derivation_text(const ObstructionReport& r) {
  std::ostringstream out;
  out << "point:";
  for (double v : r.point) out << ' ' << format_full(v);
  out << "\n\nexpansion of N^r_ik N^s_ri J^k_s:\n";
  for (const auto& [name, value] : r.ledger.terms()) out << "  " << name << " = " << format_full(value) << '\n';
  out << "  sum of terms = " << format_full(r.ledger.total) << '\n';
  out << "  contraction  = " << format_full(r.contraction) << '\n';
  out << "  |sum - contraction| = " << format_full(r.ledger_residual) << "\n\ncancellation claims (|lhs|):\n";
  for (const auto& [name, value] : r.boxed_residuals) out << "  " << name << ": " << format_full(value) << '\n';
  out << "\nfinal reduction:\n";
  out << "  L_J = " << format_full(r.l_j_formula) << '\n';
  out << "  |contraction - L_J| = " << format_full(r.identity_residual_final) << '\n';
  out << "  double trace = " << format_full(r.double_trace) << '\n';
  out << "  |double trace - L_J| = " << format_full(r.identity_residual_LJ1) << '\n';
  out << "verdict: " << to_string(r.verdict) << '\n';
  return out.str();
}

/// Minimal RFC 4180 quoting.
inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace acs
