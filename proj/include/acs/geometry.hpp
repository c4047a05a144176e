#pragma once

// Charts, almost-complex-structure and metric fields, Christoffel symbols and
// the jet-level change to Riemannian normal coordinates at a point.
//
// Index convention: J(i, j) is row i, column j, and stands for J^i_j. The
// derivative array of a JetMatrix is partials[k](i, j) = d_k J(i, j).

#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "acs/expr.hpp"
#include "acs/random.hpp"
#include "acs/tensor.hpp"

namespace acs {

/// Raised for singular or non-positive-definite matrices at a point.
class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChartSpec {
 public:
  ChartSpec() = default;

  ChartSpec(std::size_t dim, std::vector<std::string> var_names) : dim_(dim), names_(std::move(var_names)) {
    if (dim_ == 0 || dim_ % 2 != 0) throw std::invalid_argument("dimension must be even");
    if (names_.size() != dim_) {
      throw std::invalid_argument("chart has " + std::to_string(names_.size()) +
                                  " variable names for dimension " + std::to_string(dim_));
    }
    std::set<std::string> seen;
    for (const auto& name : names_) {
      if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
        throw std::invalid_argument("invalid variable name '" + name + "'");
      }
      for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
          throw std::invalid_argument("invalid variable name '" + name + "'");
        }
      }
      if (is_reserved_name(name)) throw std::invalid_argument("variable name '" + name + "' is reserved");
      if (!seen.insert(name).second) throw std::invalid_argument("duplicate variable name '" + name + "'");
    }
  }

  /// x1..xn.
  static ChartSpec standard(std::size_t dim) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
    return ChartSpec(dim, std::move(names));
  }

  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& var_names() const { return names_; }

  friend bool operator==(const ChartSpec&, const ChartSpec&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> names_;
};

/// Values and first partials of an n x n matrix-valued field at one point.
struct JetMatrix {
  Matrix values;
  std::vector<Matrix> partials;  // partials[k](i, j) = d_k entry (i, j)
  double condition = 1.0;        // of A (conjugation) or D phi (pullback)

  JetMatrix() = default;
  explicit JetMatrix(std::size_t n)
      : values(Matrix::Zero(n, n)), partials(n, Matrix::Zero(n, n)) {}

  std::size_t dim() const { return static_cast<std::size_t>(values.rows()); }

  static JetMatrix constant(const Matrix& m) {
    JetMatrix out(static_cast<std::size_t>(m.rows()));
    out.values = m;
    return out;
  }

  bool is_finite() const {
    if (!values.allFinite()) return false;
    for (const auto& p : partials) {
      if (!p.allFinite()) return false;
    }
    return true;
  }
};

/// Standard block structure: J0(2a+1, 2a) = 1, J0(2a, 2a+1) = -1.
inline Matrix standard_structure(std::size_t n) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument("dimension must be even");
  Matrix j0 = Matrix::Zero(n, n);
  for (std::size_t a = 0; a + 1 < n; a += 2) {
    j0(a + 1, a) = 1.0;
    j0(a, a + 1) = -1.0;
  }
  return j0;
}

namespace detail {

inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

// Inverse with a singularity check; `what` names the matrix in the error.
inline Matrix checked_inverse(const Matrix& m, double& condition, const char* what) {
  condition = condition_number(m);
  if (!std::isfinite(condition) || condition > 1e14) {
    throw SingularError(std::string(what) + " is singular at the point (condition " +
                        std::to_string(condition) + ")");
  }
  return m.partialPivLu().inverse();
}

inline std::vector<BoundExpr> bind_all(const std::vector<Expr>& exprs, const ChartSpec& chart) {
  std::vector<BoundExpr> out;
  out.reserve(exprs.size());
  for (const auto& e : exprs) out.emplace_back(e, chart.var_names());
  return out;
}

inline void check_point(const ChartSpec& chart, std::span<const double> point) {
  if (point.size() != chart.dim()) {
    throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                                std::to_string(chart.dim()));
  }
}

}  // namespace detail

/// J given entry by entry; entries is row-major n*n.
struct ExplicitJ {
  std::vector<Expr> entries;
};

/// J = A J0 A^-1.
struct ConjugationJ {
  std::vector<Expr> a;  // row-major n*n
  Matrix j0;
};

/// J = (D phi)^-1 J0 (D phi), integrable by construction.
struct PullbackJ {
  std::vector<Expr> phi;  // n components
  Matrix j0;
};

class MatrixField {
 public:
  using Definition = std::variant<ExplicitJ, ConjugationJ, PullbackJ>;

  MatrixField(ChartSpec chart, Definition def) : chart_(std::move(chart)), def_(std::move(def)) {
    const std::size_t n = chart_.dim();
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ExplicitJ>) {
            if (d.entries.size() != n * n) throw std::invalid_argument("J needs n*n entries");
            bound_ = detail::bind_all(d.entries, chart_);
          } else if constexpr (std::is_same_v<T, ConjugationJ>) {
            if (d.a.size() != n * n) throw std::invalid_argument("A needs n*n entries");
            check_j0(d.j0, n);
            bound_ = detail::bind_all(d.a, chart_);
          } else {
            if (d.phi.size() != n) throw std::invalid_argument("phi needs n components");
            check_j0(d.j0, n);
            bound_ = detail::bind_all(d.phi, chart_);
          }
        },
        def_);
  }

  const ChartSpec& chart() const { return chart_; }
  const Definition& definition() const { return def_; }

  /// Structural equality of the defining expressions and constants.
  friend bool operator==(const MatrixField& a, const MatrixField& b) {
    if (!(a.chart_ == b.chart_) || a.def_.index() != b.def_.index()) return false;
    return std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.def_);
          if constexpr (std::is_same_v<T, ExplicitJ>) {
            return x.entries == y.entries;
          } else if constexpr (std::is_same_v<T, ConjugationJ>) {
            return x.a == y.a && x.j0 == y.j0;
          } else {
            return x.phi == y.phi && x.j0 == y.j0;
          }
        },
        a.def_);
  }

  JetMatrix eval(std::span<const double> point) const {
    detail::check_point(chart_, point);
    const std::size_t n = chart_.dim();
    if (const auto* d = std::get_if<ConjugationJ>(&def_)) return eval_conjugation(d->j0, point);
    if (const auto* d = std::get_if<PullbackJ>(&def_)) return eval_pullback(d->j0, point);
    JetMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Jet1 e = bound_[i * n + j].eval<1>(point);
        out.values(i, j) = e.value();
        for (std::size_t k = 0; k < n; ++k) out.partials[k](i, j) = e.partial(k);
      }
    }
    return out;
  }

 private:
  static void check_j0(const Matrix& j0, std::size_t n) {
    if (static_cast<std::size_t>(j0.rows()) != n || static_cast<std::size_t>(j0.cols()) != n) {
      throw std::invalid_argument("J0 must be n x n");
    }
  }

  JetMatrix eval_conjugation(const Matrix& j0, std::span<const double> point) const {
    const std::size_t n = chart_.dim();
    Matrix a(n, n);
    std::vector<Matrix> da(n, Matrix(n, n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Jet1 e = bound_[i * n + j].eval<1>(point);
        a(i, j) = e.value();
        for (std::size_t k = 0; k < n; ++k) da[k](i, j) = e.partial(k);
      }
    }
    JetMatrix out(n);
    const Matrix a_inv = detail::checked_inverse(a, out.condition, "A");
    const Matrix j0_a_inv = j0 * a_inv;
    out.values = a * j0_a_inv;
    // d(A J0 A^-1) = dA J0 A^-1 - (A J0 A^-1) dA A^-1
    for (std::size_t k = 0; k < n; ++k) out.partials[k] = da[k] * j0_a_inv - out.values * da[k] * a_inv;
    return out;
  }

  JetMatrix eval_pullback(const Matrix& j0, std::span<const double> point) const {
    const std::size_t n = chart_.dim();
    Matrix m(n, n);  // m(a, b) = d_b phi^a
    std::vector<Matrix> dm(n, Matrix(n, n));
    for (std::size_t a = 0; a < n; ++a) {
      const Jet2 phi = bound_[a].eval<2>(point);
      for (std::size_t b = 0; b < n; ++b) {
        m(a, b) = phi.partial(b);
        for (std::size_t c = 0; c < n; ++c) dm[c](a, b) = phi.hessian(b, c);
      }
    }
    JetMatrix out(n);
    const Matrix m_inv = detail::checked_inverse(m, out.condition, "D phi");
    const Matrix m_inv_j0 = m_inv * j0;
    out.values = m_inv_j0 * m;
    // d(M^-1 J0 M) = -M^-1 dM (M^-1 J0 M) + M^-1 J0 dM
    for (std::size_t c = 0; c < n; ++c) out.partials[c] = m_inv_j0 * dm[c] - m_inv * dm[c] * out.values;
    return out;
  }

  ChartSpec chart_;
  Definition def_;
  std::vector<BoundExpr> bound_;
};

/// Metric entries g_ij; `euclidean()` marks the identity metric so callers can
/// skip the normal-coordinate change.
class MetricField {
 public:
  MetricField(ChartSpec chart, std::vector<Expr> entries, bool euclidean = false)
      : chart_(std::move(chart)), entries_(std::move(entries)), euclidean_(euclidean) {
    const std::size_t n = chart_.dim();
    if (entries_.size() != n * n) throw std::invalid_argument("metric needs n*n entries");
    bound_ = detail::bind_all(entries_, chart_);
  }

  static MetricField euclidean(const ChartSpec& chart) {
    const std::size_t n = chart.dim();
    std::vector<Expr> entries(n * n, Expr::constant(0.0));
    for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = Expr::constant(1.0);
    return MetricField(chart, std::move(entries), true);
  }

  const ChartSpec& chart() const { return chart_; }
  const std::vector<Expr>& entries() const { return entries_; }
  bool is_euclidean() const { return euclidean_; }

  friend bool operator==(const MetricField& a, const MetricField& b) {
    return a.chart_ == b.chart_ && a.euclidean_ == b.euclidean_ && a.entries_ == b.entries_;
  }

  /// Throws if the entries are not symmetric or not positive definite at the point.
  JetMatrix eval(std::span<const double> point) const {
    detail::check_point(chart_, point);
    const std::size_t n = chart_.dim();
    JetMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const Jet1 e = bound_[i * n + j].eval<1>(point);
        out.values(i, j) = e.value();
        for (std::size_t k = 0; k < n; ++k) out.partials[k](i, j) = e.partial(k);
      }
    }
    const double scale = 1.0 + max_abs(out.values);
    if (max_abs(out.values - out.values.transpose()) > 1e-12 * scale) {
      throw std::invalid_argument("metric entries are not symmetric at the point");
    }
    out.values = 0.5 * (out.values + out.values.transpose());
    for (auto& p : out.partials) p = 0.5 * (p + p.transpose()).eval();
    Eigen::LLT<Matrix> llt(out.values);
    if (llt.info() != Eigen::Success) throw SingularError("metric is not positive definite at the point");
    out.condition = detail::condition_number(out.values);
    return out;
  }

 private:
  ChartSpec chart_;
  std::vector<Expr> entries_;
  std::vector<BoundExpr> bound_;
  bool euclidean_ = false;
};

inline JetMatrix eval_field(const MatrixField& field, std::span<const double> point) { return field.eval(point); }
inline JetMatrix eval_field(const MetricField& field, std::span<const double> point) { return field.eval(point); }

template <class Field>
JetMatrix eval_field(const Field& field, const ChartSpec& chart, std::span<const double> point) {
  if (!(field.chart() == chart)) throw std::invalid_argument("field is defined on a different chart");
  return field.eval(point);
}

struct AcsCheck {
  bool ok = false;
  double residual = 0.0;  // max-norm of J*J + I
  Matrix residual_matrix;
};

inline AcsCheck validate_acs(const JetMatrix& jm, double tol) {
  if (jm.values.rows() != jm.values.cols()) throw std::invalid_argument("J must be square");
  AcsCheck out;
  const auto n = jm.values.rows();
  out.residual_matrix = jm.values * jm.values + Matrix::Identity(n, n);
  out.residual = max_abs(out.residual_matrix);
  out.ok = out.residual <= tol;
  return out;
}

/// Gamma(k, i, j) = Gamma^k_ij.
class ChristoffelSymbols : public Tensor3 {
 public:
  using Tensor3::Tensor3;
};

inline ChristoffelSymbols christoffel(const JetMatrix& g) {
  const std::size_t n = g.dim();
  Eigen::LLT<Matrix> llt(g.values);
  if (llt.info() != Eigen::Success) throw SingularError("metric is not positive definite");
  const Matrix g_inv = llt.solve(Matrix::Identity(n, n));
  // First kind: lowered(l, i, j) = 1/2 (d_i g_jl + d_j g_il - d_l g_ij), symmetric in (i, j).
  Tensor3 lowered(n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = 0.5 * (g.partials[i](j, l) + g.partials[j](i, l) - g.partials[l](i, j));
        lowered(l, i, j) = v;
        lowered(l, j, i) = v;
      }
    }
  }
  ChristoffelSymbols gamma(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l) s += g_inv(k, l) * lowered(l, i, j);
        gamma(k, i, j) = s;
        gamma(k, j, i) = s;
      }
    }
  }
  return gamma;
}

/// Linear and quadratic data of the coordinate change
///   x = p + A y + 1/2 Q(y, y),   Q^k_bc = -Gamma^k_ij A^i_b A^j_c,
/// with A^T g A = I, which makes y normal coordinates at p to first order.
struct NormalFrame {
  Matrix a;
  Matrix a_inv;
  ChristoffelSymbols gamma;
  Tensor3 quadratic;  // quadratic(k, b, c) = Q^k_bc = d^2 x^k / dy^b dy^c
};

inline NormalFrame normal_frame(const JetMatrix& g) {
  const std::size_t n = g.dim();
  Eigen::LLT<Matrix> llt(g.values);
  if (llt.info() != Eigen::Success) throw SingularError("metric is not positive definite");
  NormalFrame f;
  // g = L L^T  =>  A = L^-T satisfies A^T g A = I.
  const Matrix l = llt.matrixL();
  f.a_inv = l.transpose();
  f.a = f.a_inv.triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  f.gamma = christoffel(g);
  f.quadratic = Tensor3(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) s += f.gamma(k, i, j) * f.a(i, b) * f.a(j, c);
        }
        f.quadratic(k, b, c) = -s;
      }
    }
  }
  return f;
}

/// Endomorphism field in the new coordinates: values A^-1 J A, and
///   d~_c J~ = A^-1 (d_k J A^k_c) A - A^-1 Q_c J~ + A^-1 J Q_c,
/// where Q_c(i, b) = Q^i_bc.
inline JetMatrix transform_endomorphism(const JetMatrix& j, const NormalFrame& f) {
  const std::size_t n = j.dim();
  JetMatrix out(n);
  out.condition = j.condition;
  out.values = f.a_inv * j.values * f.a;
  const Matrix a_inv_j = f.a_inv * j.values;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix dj = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) dj += f.a(k, c) * j.partials[k];
    Matrix qc(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t b = 0; b < n; ++b) qc(i, b) = f.quadratic(i, b, c);
    }
    out.partials[c] = f.a_inv * dj * f.a - f.a_inv * qc * out.values + a_inv_j * qc;
  }
  return out;
}

/// Bilinear form in the new coordinates: A^T g A and
///   d~_c g~_ab = Q^i_ac g_ij A^j_b + A^i_a g_ij Q^j_bc + A^i_a A^j_b d_k g_ij A^k_c.
inline JetMatrix transform_metric(const JetMatrix& g, const NormalFrame& f) {
  const std::size_t n = g.dim();
  JetMatrix out(n);
  out.values = f.a.transpose() * g.values * f.a;
  const Matrix g_a = g.values * f.a;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix dg = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) dg += f.a(k, c) * g.partials[k];
    Matrix qc(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t b = 0; b < n; ++b) qc(i, b) = f.quadratic(i, b, c);
    }
    const Matrix cross = qc.transpose() * g_a;
    out.partials[c] = cross + cross.transpose() + f.a.transpose() * dg * f.a;
  }
  return out;
}

/// J in normal coordinates of g at the evaluation point.
inline JetMatrix normal_transform(const JetMatrix& j, const JetMatrix& g) {
  return transform_endomorphism(j, normal_frame(g));
}

/// Conjugation field A J0 A^-1 with A = I + P(x), where each entry of P is a
/// polynomial of total degree <= degree with coefficients uniform in [-0.3, 0.3].
/// Identical seeds give bit-identical coefficients on every platform.
inline MatrixField random_conjugation_acs(std::size_t dim, int degree, std::uint64_t seed) {
  if (degree < 0) throw std::invalid_argument("degree must be non-negative");
  const ChartSpec chart = ChartSpec::standard(dim);
  Rng rng(seed);
  auto coefficient = [&] { return rng.uniform(-0.3, 0.3); };

  // Exponent vectors of total degree <= degree, graded then lexicographic.
  std::vector<std::vector<int>> monomials;
  std::vector<int> exps(dim, 0);
  for (int total = 0; total <= degree; ++total) {
    auto fill = [&](auto&& self, std::size_t var, int remaining) -> void {
      if (var + 1 == dim) {
        exps[var] = remaining;
        monomials.push_back(exps);
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        exps[var] = e;
        self(self, var + 1, remaining - e);
      }
    };
    fill(fill, 0, total);
  }

  auto monomial_expr = [&](const std::vector<int>& m) {
    std::optional<Expr> out;
    for (std::size_t v = 0; v < dim; ++v) {
      if (m[v] == 0) continue;
      Expr factor = Expr::variable(chart.var_names()[v]);
      if (m[v] > 1) factor = Expr::binary(BinaryOp::pow, factor, Expr::constant(m[v]));
      out = out ? *out * factor : factor;
    }
    return out;
  };

  std::vector<Expr> a;
  a.reserve(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      Expr entry = Expr::constant(i == j ? 1.0 : 0.0);
      for (const auto& m : monomials) {
        const double c = coefficient();
        const auto mono = monomial_expr(m);
        const Expr term = mono ? Expr::constant(std::abs(c)) * *mono : Expr::constant(std::abs(c));
        entry = c < 0.0 ? entry - term : entry + term;
      }
      a.push_back(entry);
    }
  }
  return MatrixField(chart, ConjugationJ{std::move(a), standard_structure(dim)});
}

}  // namespace acs
