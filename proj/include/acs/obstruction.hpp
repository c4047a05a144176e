#pragma once

// The obstruction function L_J, the sixteen-term expansion of the
// contraction N^r_ik N^s_ri J^k_s, and the per-point identity report that
// replays the derivation numerically.
//
// Every formula here is written for coordinates that are normal for the
// working metric at the point, where repeated indices are summed regardless
// of their placement. J^a_b, J_b^a and the other placements all mean the
// matrix entry J(a, b) (row a, column b), and J_i f = J_i^p d_p f means
// sum_p J(p, i) d_p f.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "acs/geometry.hpp"
#include "acs/nijenhuis.hpp"

namespace acs {

namespace detail {

// Sum of f(idx) over all idx in {0..n-1}^K.
template <std::size_t K, class F>
double index_sum(std::size_t n, F&& f) {
  std::array<std::size_t, K> idx{};
  double s = 0.0;
  for (;;) {
    s += f(idx);
    std::size_t pos = K;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < n) break;
      idx[pos] = 0;
      if (pos == 0) return s;
    }
  }
}

// directional(i)(a, b) = J_i J^a_b = sum_p J(p, i) d_p J(a, b).
inline std::vector<Matrix> directional_derivatives(const JetMatrix& jm) {
  const std::size_t n = jm.dim();
  std::vector<Matrix> out(n, Matrix::Zero(n, n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < n; ++p) out[i] += jm.values(p, i) * jm.partials[p];
  }
  return out;
}

}  // namespace detail

/// L_J = -d_j(J^i_l J_l^k) d_i J_k^j
///     = -sum_{i,j,k} [sum_l (d_j J(i,l) J(k,l) + J(i,l) d_j J(k,l))] d_i J(j,k).
inline double l_j_formula(const JetMatrix& jm) {
  const Matrix& V = jm.values;
  const auto& D = jm.partials;
  return -detail::index_sum<4>(jm.dim(), [&](const auto& x) {
    const auto [i, j, k, l] = x;
    return (D[j](i, l) * V(k, l) + V(i, l) * D[j](k, l)) * D[i](j, k);
  });
}

/// Terms of the expanded product, named by line (I..IV) and position.
struct TermLedger {
  double I1 = 0, I2 = 0, I3 = 0, I4 = 0;
  double II1 = 0, II2 = 0, II3 = 0, II4 = 0, II5 = 0;
  double III1 = 0, III2 = 0, III3 = 0;
  double IV1 = 0, IV2 = 0, IV3 = 0, IV4 = 0;
  double first_quadratic = 0;  // -J_t^k J_p^i J_p^j d_i J^l_k d_j J^t_l
  double total = 0;            // sum of the sixteen terms

  /// (name, value) pairs of the sixteen terms in line order.
  std::vector<std::pair<std::string, double>> terms() const {
    return {{"I1", I1},     {"I2", I2},     {"I3", I3},     {"I4", I4},   {"II1", II1}, {"II2", II2},
            {"II3", II3},   {"II4", II4},   {"II5", II5},   {"III1", III1}, {"III2", III2},
            {"III3", III3}, {"IV1", IV1},   {"IV2", IV2},   {"IV3", IV3}, {"IV4", IV4}};
  }
};

/// Evaluates each term from its printed index pattern. The expansion is
///   {J_s^k J_iJ^r_k - d_iJ^r_s - J_i^p J_sJ^r_p + d_sJ^r_i}
///   {-J_iJ^s_r - J_r^q d_iJ^s_q + J_rJ^s_i + J_i^q d_rJ^s_q},
/// which equals N^r_ik N^s_ri J^k_s wherever J^2 = -1 at the point.
inline TermLedger term_ledger(const JetMatrix& jm) {
  const std::size_t n = jm.dim();
  const Matrix& V = jm.values;  // J_a^b, J^b_a -> V(b, a)
  const auto& D = jm.partials;  // d_c J^a_b    -> D[c](a, b)
  const auto DJ = detail::directional_derivatives(jm);  // J_c J^a_b -> DJ[c](a, b)
  using detail::index_sum;

  TermLedger t;
  // Line I.
  // -J_s^k . J_iJ^r_k . J_iJ^s_r
  t.I1 = -index_sum<4>(n, [&](const auto& x) {
    const auto [i, k, r, s] = x;
    return V(k, s) * DJ[i](r, k) * DJ[i](s, r);
  });
  // +J_s^k . J_iJ^r_k . J_rJ^s_i
  t.I2 = index_sum<4>(n, [&](const auto& x) {
    const auto [i, k, r, s] = x;
    return V(k, s) * DJ[i](r, k) * DJ[r](s, i);
  });
  // +J_i^p . J_sJ^r_p . J_iJ^s_r
  t.I3 = index_sum<4>(n, [&](const auto& x) {
    const auto [i, p, r, s] = x;
    return V(p, i) * DJ[s](r, p) * DJ[i](s, r);
  });
  // -J_i^p . J_sJ^r_p . J_rJ^s_i
  t.I4 = -index_sum<4>(n, [&](const auto& x) {
    const auto [i, p, r, s] = x;
    return V(p, i) * DJ[s](r, p) * DJ[r](s, i);
  });

  // Line II.
  // -J_r^q J_s^k . J_iJ^r_k . d_iJ^s_q
  t.II1 = -index_sum<5>(n, [&](const auto& x) {
    const auto [i, k, q, r, s] = x;
    return V(q, r) * V(k, s) * DJ[i](r, k) * D[i](s, q);
  });
  // +J_i^q J_s^k . J_iJ^r_k . d_rJ^s_q
  t.II2 = index_sum<5>(n, [&](const auto& x) {
    const auto [i, k, q, r, s] = x;
    return V(q, i) * V(k, s) * DJ[i](r, k) * D[r](s, q);
  });
  // -J_rJ^s_i . d_iJ^r_s
  t.II3 = -index_sum<3>(n, [&](const auto& x) {
    const auto [i, r, s] = x;
    return DJ[r](s, i) * D[i](r, s);
  });
  // +J_iJ^s_r . d_iJ^r_s
  t.II4 = index_sum<3>(n, [&](const auto& x) {
    const auto [i, r, s] = x;
    return DJ[i](s, r) * D[i](r, s);
  });
  // +J_r^q J_i^p . J_sJ^r_p . d_iJ^s_q
  t.II5 = index_sum<5>(n, [&](const auto& x) {
    const auto [i, p, q, r, s] = x;
    return V(q, r) * V(p, i) * DJ[s](r, p) * D[i](s, q);
  });

  // Line III.
  // -J_i^q J_i^p . J_sJ^r_p . d_rJ^s_q
  t.III1 = -index_sum<5>(n, [&](const auto& x) {
    const auto [i, p, q, r, s] = x;
    return V(q, i) * V(p, i) * DJ[s](r, p) * D[r](s, q);
  });
  // -J_iJ^s_r . d_sJ^r_i
  t.III2 = -index_sum<3>(n, [&](const auto& x) {
    const auto [i, r, s] = x;
    return DJ[i](s, r) * D[s](r, i);
  });
  // +J_rJ^s_i . d_sJ^r_i
  t.III3 = index_sum<3>(n, [&](const auto& x) {
    const auto [i, r, s] = x;
    return DJ[r](s, i) * D[s](r, i);
  });

  // Line IV.
  // +J_r^q d_iJ^s_q . d_iJ^r_s
  t.IV1 = index_sum<4>(n, [&](const auto& x) {
    const auto [i, q, r, s] = x;
    return V(q, r) * D[i](s, q) * D[i](r, s);
  });
  // -J_i^q d_rJ^s_q . d_iJ^r_s
  t.IV2 = -index_sum<4>(n, [&](const auto& x) {
    const auto [i, q, r, s] = x;
    return V(q, i) * D[r](s, q) * D[i](r, s);
  });
  // -J_r^q d_iJ^s_q . d_sJ^r_i
  t.IV3 = -index_sum<4>(n, [&](const auto& x) {
    const auto [i, q, r, s] = x;
    return V(q, r) * D[i](s, q) * D[s](r, i);
  });
  // +J_i^q d_rJ^s_q . d_sJ^r_i
  t.IV4 = index_sum<4>(n, [&](const auto& x) {
    const auto [i, q, r, s] = x;
    return V(q, i) * D[r](s, q) * D[s](r, i);
  });

  // -J_t^k J_p^i J_p^j . d_iJ^l_k . d_jJ^t_l
  t.first_quadratic = -index_sum<6>(n, [&](const auto& x) {
    const auto [i, j, k, l, p, tt] = x;
    return V(k, tt) * V(i, p) * V(j, p) * D[i](l, k) * D[j](tt, l);
  });

  double total = 0.0;
  for (const auto& [name, value] : t.terms()) total += value;
  t.total = total;
  return t;
}

/// Cancellation claims among ledger terms; each value is |claimed zero|.
inline std::vector<std::pair<std::string, double>> boxed_residuals(const TermLedger& t) {
  return {
      {"II3+IV3", std::abs(t.II3 + t.IV3)},   {"II2+III2", std::abs(t.II2 + t.III2)},
      {"II5+IV2", std::abs(t.II5 + t.IV2)},   {"II1+II4", std::abs(t.II1 + t.II4)},
      {"I2+I3", std::abs(t.I2 + t.I3)},       {"I4+III1", std::abs(t.I4 + t.III1)},
      {"III1-III3", std::abs(t.III1 - t.III3)}, {"first_quadratic", std::abs(t.first_quadratic)},
  };
}

struct Tolerances {
  double alg = 1e-9;       // J^2 = -1 validity, max-norm
  double identity = 1e-9;  // relative, for algebraically forced identities
};

enum class Verdict { consistent, ledger_anomaly, invalid_acs };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::ledger_anomaly: return "ledger-anomaly";
    case Verdict::invalid_acs: return "invalid-acs";
  }
  return "?";
}

struct ObstructionReport {
  std::vector<double> point;
  double j_squared_residual = 0;
  double n_max_abs = 0;
  double l_j_formula = 0;
  double contraction = 0;
  double double_trace = 0;
  double identity_residual_LJ1 = 0;    // |double_trace - l_j_formula|
  double identity_residual_final = 0;  // |contraction - l_j_formula|
  TermLedger ledger;
  std::vector<std::pair<std::string, double>> boxed_residuals;
  Verdict verdict = Verdict::consistent;

  // Diagnostics beyond the headline quantities.
  double ledger_residual = 0;          // |ledger.total - contraction|
  double contraction_magnitude = 0;    // sum of |summands| of the contraction; scale for relative checks
  double formula_residual = 0;         // max |standard - derivation form| of N
  double double_trace_literal = 0;     // g^{ij} g^{kl} N(e_i,e_k,e_i,e_k) summed over all four
  double field_condition = 1;          // of A or D phi
  bool normal_coordinates = false;     // whether the normal-coordinate change was applied
};

/// Evaluates everything at one point. N, BigN and the double trace use the
/// original coordinates and g; L_J, the ledger and the contraction use J in
/// normal coordinates of g (the original jets when g is Euclidean).
inline ObstructionReport identity_report(const MatrixField& j_field, const MetricField& g_field,
                                         std::span<const double> point, const Tolerances& tol = {}) {
  if (!(j_field.chart() == g_field.chart())) throw std::invalid_argument("J and g use different charts");
  ObstructionReport rep;
  rep.point.assign(point.begin(), point.end());

  const JetMatrix jm = j_field.eval(point);
  const JetMatrix g = g_field.eval(point);
  const std::size_t n = jm.dim();
  rep.field_condition = jm.condition;
  rep.j_squared_residual = validate_acs(jm, tol.alg).residual;

  const NijenhuisComponents nij = nijenhuis_standard(jm);
  const NijenhuisComponents nij_expanded = nijenhuis_expanded_form(jm);
  rep.n_max_abs = nij.max_abs();
  for (std::size_t a = 0; a < nij.data().size(); ++a) {
    rep.formula_residual = std::max(rep.formula_residual, std::abs(nij.data()[a] - nij_expanded.data()[a]));
  }

  Eigen::LLT<Matrix> llt(g.values);
  if (llt.info() != Eigen::Success) throw SingularError("metric is not positive definite");
  const Matrix g_inv = llt.solve(Matrix::Identity(n, n));
  const BigN bn = big_n(nij, jm.values, g.values);
  rep.double_trace = double_trace(bn, g_inv);
  rep.double_trace_literal = double_trace_literal(bn, g_inv);

  rep.normal_coordinates = !g_field.is_euclidean();
  const JetMatrix jn = rep.normal_coordinates ? normal_transform(jm, g) : jm;
  rep.l_j_formula = l_j_formula(jn);
  rep.ledger = term_ledger(jn);
  const NijenhuisComponents nij_n = rep.normal_coordinates ? nijenhuis_standard(jn) : nij;
  rep.contraction = contraction_scalar(nij_n, jn.values);
  rep.contraction_magnitude = contraction_magnitude(nij_n, jn.values);
  rep.boxed_residuals = boxed_residuals(rep.ledger);

  rep.identity_residual_LJ1 = std::abs(rep.double_trace - rep.l_j_formula);
  rep.identity_residual_final = std::abs(rep.contraction - rep.l_j_formula);
  rep.ledger_residual = std::abs(rep.ledger.total - rep.contraction);

  if (rep.j_squared_residual > tol.alg) {
    rep.verdict = Verdict::invalid_acs;
  } else if (rep.ledger_residual <= tol.identity * (1.0 + rep.contraction_magnitude)) {
    rep.verdict = Verdict::consistent;
  } else {
    rep.verdict = Verdict::ledger_anomaly;
  }
  return rep;
}

inline ObstructionReport identity_report(const MatrixField& j_field, std::span<const double> point,
                                         const Tolerances& tol = {}) {
  return identity_report(j_field, MetricField::euclidean(j_field.chart()), point, tol);
}

}  // namespace acs
