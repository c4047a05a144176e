#pragma once

// Line-oriented structure files:
//
//   # comment
//   [meta]
//   name = expblock4
//   description = block-diagonal example
//   [chart]
//   dim = 4
//   vars = x1 x2 x3 x4
//   [J]
//   kind = explicit            # or conjugation / pullback
//   1 2 = -1                   # explicit: J entry (row, col), 1-based
//   [J0]                       # conjugation/pullback base structure
//   1 2 = -1
//   [metric]
//   1 1 = 1 + x1^2
//
// For kind = conjugation the [J] entries define A (unspecified: identity);
// for kind = pullback they are lines `<i> = <expr>` defining phi^i
// (unspecified: x_i). An omitted [J0] is the standard block structure, an
// omitted [metric] is Euclidean. Unspecified explicit J entries are 0,
// unspecified metric entries are 0 off the diagonal and 1 on it; a metric
// entry given only as (i, j) is mirrored to (j, i).

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "acs/expr.hpp"
#include "acs/geometry.hpp"

namespace acs {

class StructureError : public std::runtime_error {
 public:
  StructureError(std::size_t line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct StructureFile {
  std::string name;
  std::string description;
  ChartSpec chart;
  MatrixField j;
  MetricField metric;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct RawEntry {
  std::size_t line;
  std::vector<std::size_t> index;  // 1-based, one or two
  std::string expr;
};

struct RawSection {
  std::size_t line = 0;
  std::map<std::string, std::pair<std::size_t, std::string>> keys;  // key -> (line, value)
  std::vector<RawEntry> entries;
};

inline std::size_t parse_index(std::string_view word, std::size_t line) {
  std::size_t v = 0;
  if (word.empty()) throw StructureError(line, "expected index");
  for (char c : word) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw StructureError(line, "expected index, found '" + std::string(word) + "'");
    }
    v = v * 10 + static_cast<std::size_t>(c - '0');
    if (v > 1000000) throw StructureError(line, "index too large");
  }
  return v;
}

inline std::map<std::string, RawSection> split_sections(std::istream& in) {
  static const char* known[] = {"meta", "chart", "J", "J0", "metric"};
  std::map<std::string, RawSection> sections;
  RawSection* current = nullptr;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw StructureError(lineno, "malformed section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      bool ok = false;
      for (const char* k : known) ok = ok || name == k;
      if (!ok) throw StructureError(lineno, "unknown section [" + name + "]");
      if (sections.count(name)) throw StructureError(lineno, "duplicate section [" + name + "]");
      current = &sections[name];
      current->line = lineno;
      continue;
    }
    if (!current) throw StructureError(lineno, "content before the first section");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw StructureError(lineno, "expected '='");
    const std::string_view lhs = trim(line.substr(0, eq));
    const std::string_view rhs = trim(line.substr(eq + 1));
    if (lhs.empty()) throw StructureError(lineno, "missing key before '='");
    if (std::isdigit(static_cast<unsigned char>(lhs.front()))) {
      RawEntry e{lineno, {}, std::string(rhs)};
      for (const auto& w : split_words(lhs)) e.index.push_back(parse_index(w, lineno));
      if (e.index.size() > 2) throw StructureError(lineno, "too many indices");
      if (rhs.empty()) throw StructureError(lineno, "missing expression");
      current->entries.push_back(std::move(e));
    } else {
      const std::string key(lhs);
      if (current->keys.count(key)) throw StructureError(lineno, "duplicate key '" + key + "'");
      current->keys[key] = {lineno, std::string(rhs)};
    }
  }
  return sections;
}

inline Expr parse_entry(const RawEntry& e, const ChartSpec& chart) {
  Expr ex;
  try {
    ex = parse_expr(e.expr);
  } catch (const ParseError& err) {
    throw StructureError(e.line, err.what());
  }
  for (const auto& v : variables_of(ex)) {
    bool found = false;
    for (const auto& name : chart.var_names()) found = found || name == v;
    if (!found) throw StructureError(e.line, "unknown variable '" + v + "'");
  }
  return ex;
}

// Fills an n*n grid from (row, col) entries; returns which cells were set.
inline std::vector<bool> fill_grid(const RawSection& sec, const ChartSpec& chart, std::vector<Expr>& grid,
                                   const char* what) {
  const std::size_t n = chart.dim();
  std::vector<bool> set(n * n, false);
  for (const auto& e : sec.entries) {
    if (e.index.size() != 2) throw StructureError(e.line, std::string(what) + " entries need '<row> <col> ='");
    const auto [r, c] = std::pair{e.index[0], e.index[1]};
    if (r < 1 || r > n || c < 1 || c > n) {
      throw StructureError(e.line, "index out of range for dimension " + std::to_string(n));
    }
    const std::size_t at = (r - 1) * n + (c - 1);
    if (set[at]) throw StructureError(e.line, "duplicate entry " + std::to_string(r) + " " + std::to_string(c));
    grid[at] = parse_entry(e, chart);
    set[at] = true;
  }
  return set;
}

inline Matrix parse_constant_matrix(const RawSection& sec, const ChartSpec& chart) {
  const std::size_t n = chart.dim();
  std::vector<Expr> grid(n * n, Expr::constant(0.0));
  fill_grid(sec, chart, grid, "J0");
  Matrix m(n, n);
  const std::vector<double> origin(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Expr& e = grid[i * n + j];
      if (!variables_of(e).empty()) throw StructureError(sec.line, "[J0] entries must be constants");
      m(i, j) = BoundExpr(e, chart.var_names()).eval<1>(origin).value();
    }
  }
  return m;
}

}  // namespace detail

inline StructureFile parse_structure(std::istream& in) {
  using namespace detail;
  auto sections = split_sections(in);

  auto chart_it = sections.find("chart");
  if (chart_it == sections.end()) throw StructureError(0, "missing [chart] section");
  const RawSection& cs = chart_it->second;
  if (!cs.entries.empty()) throw StructureError(cs.entries.front().line, "unexpected entry in [chart]");
  auto dim_it = cs.keys.find("dim");
  if (dim_it == cs.keys.end()) throw StructureError(cs.line, "[chart] needs 'dim ='");
  const std::size_t dim_line = dim_it->second.first;
  const std::size_t dim = parse_index(trim(dim_it->second.second), dim_line);
  if (dim == 0 || dim % 2 != 0) throw StructureError(dim_line, "dimension must be even");
  for (const auto& [key, v] : cs.keys) {
    if (key != "dim" && key != "vars") throw StructureError(v.first, "unknown key '" + key + "' in [chart]");
  }

  ChartSpec chart;
  try {
    if (auto vit = cs.keys.find("vars"); vit != cs.keys.end()) {
      auto names = split_words(vit->second.second);
      if (names.size() != dim) {
        throw StructureError(vit->second.first, "dimension mismatch: dim = " + std::to_string(dim) + " but " +
                                                    std::to_string(names.size()) + " variables");
      }
      chart = ChartSpec(dim, std::move(names));
    } else {
      chart = ChartSpec::standard(dim);
    }
  } catch (const std::invalid_argument& err) {
    throw StructureError(cs.line, err.what());
  }
  const std::size_t n = dim;

  StructureFile out{"", "", chart, MatrixField(chart, ExplicitJ{std::vector<Expr>(n * n)}),
                    MetricField::euclidean(chart)};

  if (auto it = sections.find("meta"); it != sections.end()) {
    if (!it->second.entries.empty()) throw StructureError(it->second.entries.front().line, "unexpected entry in [meta]");
    for (const auto& [key, v] : it->second.keys) {
      if (key == "name") {
        out.name = v.second;
      } else if (key == "description") {
        out.description = v.second;
      } else {
        throw StructureError(v.first, "unknown key '" + key + "' in [meta]");
      }
    }
  }

  auto j_it = sections.find("J");
  if (j_it == sections.end()) throw StructureError(0, "missing [J] section");
  const RawSection& js = j_it->second;
  std::string kind = "explicit";
  for (const auto& [key, v] : js.keys) {
    if (key != "kind") throw StructureError(v.first, "unknown key '" + key + "' in [J]");
    kind = v.second;
  }
  Matrix j0 = standard_structure(n);
  auto j0_it = sections.find("J0");
  if (j0_it != sections.end()) {
    if (kind == "explicit") throw StructureError(j0_it->second.line, "[J0] requires kind = conjugation or pullback");
    j0 = parse_constant_matrix(j0_it->second, chart);
  }

  if (kind == "explicit") {
    std::vector<Expr> grid(n * n, Expr::constant(0.0));
    fill_grid(js, chart, grid, "J");
    out.j = MatrixField(chart, ExplicitJ{std::move(grid)});
  } else if (kind == "conjugation") {
    std::vector<Expr> grid(n * n, Expr::constant(0.0));
    for (std::size_t i = 0; i < n; ++i) grid[i * n + i] = Expr::constant(1.0);
    fill_grid(js, chart, grid, "A");
    out.j = MatrixField(chart, ConjugationJ{std::move(grid), j0});
  } else if (kind == "pullback") {
    std::vector<Expr> phi;
    for (const auto& name : chart.var_names()) phi.push_back(Expr::variable(name));
    std::vector<bool> set(n, false);
    for (const auto& e : js.entries) {
      if (e.index.size() != 1) throw StructureError(e.line, "pullback entries need '<i> ='");
      const std::size_t i = e.index[0];
      if (i < 1 || i > n) throw StructureError(e.line, "index out of range for dimension " + std::to_string(n));
      if (set[i - 1]) throw StructureError(e.line, "duplicate entry " + std::to_string(i));
      phi[i - 1] = parse_entry(e, chart);
      set[i - 1] = true;
    }
    out.j = MatrixField(chart, PullbackJ{std::move(phi), j0});
  } else {
    throw StructureError(js.keys.at("kind").first, "unknown kind '" + kind + "'");
  }

  if (auto it = sections.find("metric"); it != sections.end()) {
    const RawSection& ms = it->second;
    if (!ms.keys.empty()) throw StructureError(ms.keys.begin()->second.first, "unexpected key in [metric]");
    std::vector<Expr> grid(n * n, Expr::constant(0.0));
    for (std::size_t i = 0; i < n; ++i) grid[i * n + i] = Expr::constant(1.0);
    const auto set = fill_grid(ms, chart, grid, "metric");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (set[i * n + j] && !set[j * n + i]) grid[j * n + i] = grid[i * n + j];
      }
    }
    out.metric = MetricField(chart, std::move(grid));
  }
  return out;
}

inline StructureFile parse_structure(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_structure(in);
}

inline StructureFile load_structure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructureError(0, "cannot read '" + path + "'");
  return parse_structure(in);
}

/// Canonical text; parse_structure(write_structure(s)) reproduces s.
inline std::string write_structure(const StructureFile& s) {
  const ChartSpec& chart = s.chart;
  const std::size_t n = chart.dim();
  std::ostringstream out;
  auto entry = [&](std::size_t r, std::size_t c, const Expr& e) {
    out << r + 1 << ' ' << c + 1 << " = " << to_string(e) << '\n';
  };
  auto is_const = [](const Expr& e, double v) { return e.as_constant() == std::optional<double>(v); };
  auto write_j0 = [&](const Matrix& j0) {
    if (j0 == standard_structure(n)) return;
    out << "\n[J0]\n";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j0(i, j) != 0.0) entry(i, j, j0(i, j) < 0 ? -Expr::constant(-j0(i, j)) : Expr::constant(j0(i, j)));
      }
    }
  };

  if (!s.name.empty() || !s.description.empty()) {
    out << "[meta]\n";
    if (!s.name.empty()) out << "name = " << s.name << '\n';
    if (!s.description.empty()) out << "description = " << s.description << '\n';
    out << '\n';
  }
  out << "[chart]\ndim = " << n << "\nvars =";
  for (const auto& v : chart.var_names()) out << ' ' << v;
  out << "\n\n[J]\n";

  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ExplicitJ>) {
          out << "kind = explicit\n";
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              if (!is_const(d.entries[i * n + j], 0.0)) entry(i, j, d.entries[i * n + j]);
            }
          }
        } else if constexpr (std::is_same_v<T, ConjugationJ>) {
          out << "kind = conjugation\n";
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              if (!is_const(d.a[i * n + j], i == j ? 1.0 : 0.0)) entry(i, j, d.a[i * n + j]);
            }
          }
          write_j0(d.j0);
        } else {
          out << "kind = pullback\n";
          for (std::size_t i = 0; i < n; ++i) {
            if (!(d.phi[i] == Expr::variable(chart.var_names()[i]))) {
              out << i + 1 << " = " << to_string(d.phi[i]) << '\n';
            }
          }
          write_j0(d.j0);
        }
      },
      s.j.definition());

  if (!s.metric.is_euclidean()) {
    out << "\n[metric]\n";
    const auto& g = s.metric.entries();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_const(g[i * n + j], i == j ? 1.0 : 0.0)) entry(i, j, g[i * n + j]);
      }
    }
  }
  return out.str();
}

}  // namespace acs
