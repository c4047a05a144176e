#pragma once

// Randomized self-test: random conjugation structures at random points of the
// unit box [0, 1]^n. Hard invariants are algebraic consequences of J^2 = -1
// and are counted pass/fail; experimental identities (the cancellation
// claims, the double-trace identity, metric independence) are collected as
// residual tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "acs/geometry.hpp"
#include "acs/nijenhuis.hpp"
#include "acs/obstruction.hpp"
#include "acs/random.hpp"
#include "acs/report_io.hpp"

namespace acs {

/// g = I + 0.2 (B + B^T) + linear and quadratic terms with coefficients in
/// [-0.05, 0.05]; B uniform in [-0.5, 0.5]. Symmetric by construction, not
/// necessarily positive definite everywhere.
inline MetricField random_metric(const ChartSpec& chart, std::uint64_t seed) {
  const std::size_t n = chart.dim();
  Rng rng(seed);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform(-0.5, 0.5);
  }
  auto signed_term = [](const Expr& acc, double c, const Expr& mono) {
    const Expr term = Expr::constant(std::abs(c)) * mono;
    return c < 0.0 ? acc - term : acc + term;
  };
  std::vector<Expr> entries(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c0 = (i == j ? 1.0 : 0.0) + 0.2 * (b(i, j) + b(j, i));
      Expr e = c0 < 0.0 ? -Expr::constant(-c0) : Expr::constant(c0);
      for (std::size_t k = 0; k < n; ++k) {
        e = signed_term(e, rng.uniform(-0.05, 0.05), Expr::variable(chart.var_names()[k]));
      }
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = k; l < n; ++l) {
          e = signed_term(e, rng.uniform(-0.05, 0.05),
                          Expr::variable(chart.var_names()[k]) * Expr::variable(chart.var_names()[l]));
        }
      }
      entries[i * n + j] = e;
      entries[j * n + i] = e;
    }
  }
  return MetricField(chart, std::move(entries));
}

/// First random_metric (over derived seeds) that is positive definite at `point`.
inline MetricField random_spd_metric_at(const ChartSpec& chart, std::uint64_t seed, std::span<const double> point) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    MetricField g = random_metric(chart, derive_seed(seed, attempt));
    try {
      (void)g.eval(point);
      return g;
    } catch (const SingularError&) {
    }
  }
  throw SingularError("no positive definite metric found");
}

struct SelftestOptions {
  std::vector<std::size_t> dims{2, 4, 6};
  std::size_t samples = 100;
  int degree = 2;
  std::uint64_t seed = 42;
};

struct InvariantTally {
  std::string name;
  std::size_t checked = 0;
  std::size_t passed = 0;
  double max_residual = 0;  // in units of the check's own scale

  void record(double residual, double scale, double tol) {
    ++checked;
    const double rel = residual / scale;
    if (rel <= tol) ++passed;
    if (!(rel <= max_residual)) max_residual = std::isnan(rel) ? rel : std::max(max_residual, rel);
  }
};

/// Decade histogram of non-negative residuals.
struct ResidualTable {
  std::string name;
  std::vector<double> values;

  static constexpr std::array<const char*, 10> kBins = {
      "0", "(0,1e-15)", "[1e-15,1e-12)", "[1e-12,1e-9)", "[1e-9,1e-6)",
      "[1e-6,1e-3)", "[1e-3,1)", "[1,1e3)", "[1e3,inf)", "non-finite"};

  static std::size_t bin(double v) {
    if (!std::isfinite(v)) return 9;
    if (v == 0.0) return 0;
    const double edges[] = {1e-15, 1e-12, 1e-9, 1e-6, 1e-3, 1.0, 1e3};
    for (std::size_t k = 0; k < 7; ++k) {
      if (v < edges[k]) return k + 1;
    }
    return 8;
  }

  std::array<std::size_t, 10> histogram() const {
    std::array<std::size_t, 10> h{};
    for (double v : values) ++h[bin(v)];
    return h;
  }

  std::size_t nonfinite() const { return histogram()[9]; }

  double max() const {
    double m = 0.0;
    for (double v : values) {
      if (std::isfinite(v)) m = std::max(m, v);
    }
    return m;
  }

  double median() const {
    std::vector<double> s;
    for (double v : values) {
      if (std::isfinite(v)) s.push_back(v);
    }
    if (s.empty()) return 0.0;
    std::sort(s.begin(), s.end());
    return s[s.size() / 2];
  }
};

struct DimensionResult {
  std::size_t dim = 0;
  std::size_t samples = 0;
  std::vector<InvariantTally> hard;
  std::vector<ResidualTable> experimental;
};

struct SelftestReport {
  SelftestOptions options;
  std::vector<DimensionResult> results;

  bool all_hard_passed() const {
    for (const auto& d : results) {
      for (const auto& t : d.hard) {
        if (t.passed != t.checked) return false;
      }
    }
    return true;
  }

  bool all_residuals_finite() const {
    for (const auto& d : results) {
      for (const auto& t : d.experimental) {
        if (t.nonfinite() != 0) return false;
      }
    }
    return true;
  }
};

namespace detail {

inline double n_scale(const NijenhuisComponents& nij) { return 1.0 + nij.max_abs(); }

}  // namespace detail

struct SelftestSample {
  MatrixField field;
  std::vector<double> point;
};

/// Sample s of dimension dim: a random conjugation field and a point in [0, 1]^dim.
inline SelftestSample selftest_sample(const SelftestOptions& opt, std::size_t dim, std::size_t s) {
  SelftestSample out{random_conjugation_acs(dim, opt.degree, derive_seed(opt.seed, dim, 2 * s)),
                     std::vector<double>(dim)};
  Rng point_rng(derive_seed(opt.seed, dim, 2 * s + 1));
  for (double& x : out.point) x = point_rng.unit();
  return out;
}

inline DimensionResult selftest_dimension(std::size_t dim, const SelftestOptions& opt) {
  if (dim == 0 || dim % 2 != 0) throw std::invalid_argument("selftest dimensions must be even");
  DimensionResult res;
  res.dim = dim;
  res.samples = opt.samples;

  InvariantTally acs_valid{"acs_validity"}, equivalence{"formula_equivalence"}, antisym{"antisymmetry"},
      compat{"j_compatibility"}, ledger{"ledger_total"}, zero{"zero_propagation"}, collapse{"euclidean_trace_collapse"};

  std::vector<ResidualTable> tables = {{"LJ1_euclidean", {}},
                                       {"final_reduction", {}},
                                       {"II3+IV3", {}},
                                       {"II2+III2", {}},
                                       {"II5+IV2", {}},
                                       {"II1+II4", {}},
                                       {"I2+I3", {}},
                                       {"I4+III1", {}},
                                       {"III1-III3", {}},
                                       {"first_quadratic", {}},
                                       {"LJ1_metric", {}},
                                       {"g_independence_double_trace", {}},
                                       {"g_independence_l_j", {}},
                                       {"double_trace_readings", {}},
                                       {"abs_l_j", {}},
                                       {"ledger_residual_abs", {}}};
  auto table = [&](const std::string& name) -> ResidualTable& {
    for (auto& t : tables) {
      if (t.name == name) return t;
    }
    throw std::logic_error("no table " + name);
  };

  const ChartSpec chart = ChartSpec::standard(dim);
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const auto [field, point] = selftest_sample(opt, dim, s);

    const JetMatrix jm = field.eval(point);
    const std::size_t n = dim;
    acs_valid.record(validate_acs(jm, 1e-9).residual, 1.0, 1e-9);

    const NijenhuisComponents nij = nijenhuis_standard(jm);
    const NijenhuisComponents nij_expanded = nijenhuis_expanded_form(jm);
    double diff = 0.0, anti = 0.0, comp = 0.0, comp_scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          diff = std::max(diff, std::abs(nij(k, i, j) - nij_expanded(k, i, j)));
          anti = std::max(anti, std::abs(nij(k, i, j) + nij(k, j, i)));
          // N(JX, JY) = -N(X, Y)
          double lhs = 0.0, mag = 0.0;
          for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = 0; q < n; ++q) {
              const double t = jm.values(p, i) * jm.values(q, j) * nij(k, p, q);
              lhs += t;
              mag += std::abs(t);
            }
          }
          comp = std::max(comp, std::abs(lhs + nij(k, i, j)));
          comp_scale = std::max(comp_scale, mag);
        }
      }
    }
    equivalence.record(diff, detail::n_scale(nij), 1e-9);
    antisym.record(anti, detail::n_scale(nij), 1e-9);
    compat.record(comp, 1.0 + comp_scale, 1e-9);

    // Euclidean report.
    const MetricField euclid = MetricField::euclidean(chart);
    const ObstructionReport rep = identity_report(field, euclid, point);
    ledger.record(rep.ledger_residual, 1.0 + rep.contraction_magnitude, 1e-9);
    collapse.record(std::abs(rep.double_trace - rep.contraction), 1.0 + rep.contraction_magnitude, 1e-10);

    // Zero propagation on the frozen (constant) structure at this point, and
    // on the live jets whenever N vanishes there.
    {
      const JetMatrix frozen = JetMatrix::constant(jm.values);
      const NijenhuisComponents nz = nijenhuis_standard(frozen);
      const BigN bz = big_n(nz, frozen.values, Matrix::Identity(n, n));
      const double worst = std::max({nz.max_abs(), bz.max_abs(), std::abs(contraction_scalar(nz, frozen.values)),
                                     std::abs(double_trace(bz, Matrix::Identity(n, n)))});
      zero.record(worst, 1.0, 1e-12);
      if (rep.n_max_abs <= 1e-8) {
        const BigN live = big_n(nij, jm.values, Matrix::Identity(n, n));
        zero.record(std::max({live.max_abs(), std::abs(rep.contraction), std::abs(rep.double_trace)}), 1.0, 1e-12);
      }
    }

    table("LJ1_euclidean").values.push_back(rep.identity_residual_LJ1);
    table("final_reduction").values.push_back(rep.identity_residual_final);
    for (const auto& [name, value] : rep.boxed_residuals) table(name).values.push_back(value);
    table("abs_l_j").values.push_back(std::abs(rep.l_j_formula));
    table("ledger_residual_abs").values.push_back(rep.ledger_residual);

    // Same structure, same point, random positive definite metric.
    const MetricField g = random_spd_metric_at(chart, derive_seed(opt.seed, dim, 2 * s + 0x9e37), point);
    const ObstructionReport rep_g = identity_report(field, g, point);
    table("LJ1_metric").values.push_back(rep_g.identity_residual_LJ1);
    table("g_independence_double_trace").values.push_back(std::abs(rep_g.double_trace - rep.double_trace));
    table("g_independence_l_j").values.push_back(std::abs(rep_g.l_j_formula - rep.l_j_formula));
    table("double_trace_readings").values.push_back(std::abs(rep_g.double_trace_literal - rep_g.double_trace));
  }

  res.hard = {acs_valid, equivalence, antisym, compat, ledger, zero, collapse};
  res.experimental = std::move(tables);
  return res;
}

inline SelftestReport run_selftest(const SelftestOptions& opt) {
  SelftestReport rep;
  rep.options = opt;
  for (std::size_t d : opt.dims) rep.results.push_back(selftest_dimension(d, opt));
  return rep;
}

inline nlohmann::ordered_json to_json(const SelftestReport& rep) {
  nlohmann::ordered_json j;
  j["dims"] = rep.options.dims;
  j["samples"] = rep.options.samples;
  j["degree"] = rep.options.degree;
  j["seed"] = rep.options.seed;
  j["all_hard_invariants_passed"] = rep.all_hard_passed();
  j["all_residuals_finite"] = rep.all_residuals_finite();
  nlohmann::ordered_json per_dim = nlohmann::ordered_json::array();
  for (const auto& d : rep.results) {
    nlohmann::ordered_json dj;
    dj["dim"] = d.dim;
    dj["samples"] = d.samples;
    nlohmann::ordered_json hard;
    for (const auto& t : d.hard) {
      hard[t.name] = {{"checked", t.checked}, {"passed", t.passed}, {"max_scaled_residual", t.max_residual}};
    }
    dj["hard_invariants"] = hard;
    nlohmann::ordered_json exp;
    for (const auto& t : d.experimental) {
      nlohmann::ordered_json hist;
      const auto h = t.histogram();
      for (std::size_t b = 0; b < h.size(); ++b) hist[ResidualTable::kBins[b]] = h[b];
      exp[t.name] = {{"count", t.values.size()}, {"max", t.max()}, {"median", t.median()}, {"histogram", hist}};
    }
    dj["experimental"] = exp;
    per_dim.push_back(dj);
  }
  j["results"] = per_dim;
  normalize_zeros(j);
  return j;
}

inline std::string to_text(const SelftestReport& rep) {
  std::string out = "selftest seed=" + std::to_string(rep.options.seed) +
                    " samples=" + std::to_string(rep.options.samples) +
                    " degree=" + std::to_string(rep.options.degree) + '\n';
  char buf[256];
  for (const auto& d : rep.results) {
    out += "\ndimension " + std::to_string(d.dim) + "\n  hard invariants:\n";
    for (const auto& t : d.hard) {
      std::snprintf(buf, sizeof buf, "    %-26s %4zu/%-4zu %s  max scaled residual %.3e\n", t.name.c_str(), t.passed,
                    t.checked, t.passed == t.checked ? "PASS" : "FAIL", t.max_residual);
      out += buf;
    }
    out += "  experimental residuals (max, median, decade histogram 0 | <1e-15 | ..e-12 | ..e-9 | ..e-6 | ..e-3 | ..1 | "
           "..1e3 | >=1e3 | non-finite):\n";
    for (const auto& t : d.experimental) {
      std::snprintf(buf, sizeof buf, "    %-28s %.3e  %.3e  ", t.name.c_str(), t.max(), t.median());
      out += buf;
      for (std::size_t c : t.histogram()) out += ' ' + std::to_string(c);
      out += '\n';
    }
  }
  out += std::string("\nhard invariants: ") + (rep.all_hard_passed() ? "all passed" : "FAILURES") + '\n';
  return out;
}

}  // namespace acs
