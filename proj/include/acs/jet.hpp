#pragma once

// Forward-mode jets: a value plus its first (Order >= 1) and second
// (Order == 2) partial derivatives with respect to the n chart coordinates.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace acs {

/// Raised when an operation is evaluated outside its real domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <int Order>
class Jet {
  static_assert(Order == 1 || Order == 2, "jets are first or second order");

 public:
  Jet() = default;

  /// Constant jet: all derivatives zero.
  Jet(double value, std::size_t dim)
      : value_(value), grad_(dim, 0.0), hess_(Order == 2 ? packed_size(dim) : 0, 0.0) {}

  static Jet constant(double value, std::size_t dim) { return Jet(value, dim); }

  /// Coordinate variable x^index with value `value`.
  static Jet variable(std::size_t index, double value, std::size_t dim) {
    if (index >= dim) {
      throw std::out_of_range("jet variable index " + std::to_string(index) +
                              " out of range for dimension " + std::to_string(dim));
    }
    Jet j(value, dim);
    j.grad_[index] = 1.0;
    return j;
  }

  std::size_t dim() const { return grad_.size(); }
  double value() const { return value_; }
  double partial(std::size_t a) const { return grad_[a]; }
  std::span<const double> partials() const { return grad_; }

  /// Second derivative; (a, b) and (b, a) share storage, so symmetry is exact.
  double hessian(std::size_t a, std::size_t b) const
    requires(Order == 2)
  {
    return hess_[packed_index(a, b)];
  }

  Jet<1> truncate() const
    requires(Order == 2)
  {
    Jet<1> out(value_, dim());
    for (std::size_t a = 0; a < dim(); ++a) out.grad_[a] = grad_[a];
    return out;
  }

  Jet operator-() const {
    Jet out = *this;
    out.value_ = -value_;
    for (double& d : out.grad_) d = -d;
    for (double& d : out.hess_) d = -d;
    return out;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    check_dims(a, b);
    Jet out = a;
    out.value_ += b.value_;
    for (std::size_t i = 0; i < out.grad_.size(); ++i) out.grad_[i] += b.grad_[i];
    for (std::size_t i = 0; i < out.hess_.size(); ++i) out.hess_[i] += b.hess_[i];
    return out;
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    check_dims(a, b);
    Jet out = a;
    out.value_ -= b.value_;
    for (std::size_t i = 0; i < out.grad_.size(); ++i) out.grad_[i] -= b.grad_[i];
    for (std::size_t i = 0; i < out.hess_.size(); ++i) out.hess_[i] -= b.hess_[i];
    return out;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_dims(a, b);
    const std::size_t n = a.dim();
    Jet out(a.value_ * b.value_, n);
    for (std::size_t i = 0; i < n; ++i) out.grad_[i] = a.value_ * b.grad_[i] + b.value_ * a.grad_[i];
    if constexpr (Order == 2) {
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
          const std::size_t k = packed_index(p, q);
          out.hess_[k] = a.value_ * b.hess_[k] + b.value_ * a.hess_[k] +
                         (a.grad_[p] * b.grad_[q] + a.grad_[q] * b.grad_[p]);
        }
      }
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    check_dims(a, b);
    if (b.value_ == 0.0) throw DomainError("division by zero");
    return a * reciprocal(b);
  }

  friend Jet operator*(double s, const Jet& a) {
    Jet out = a;
    out.value_ *= s;
    for (double& d : out.grad_) d *= s;
    for (double& d : out.hess_) d *= s;
    return out;
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator+(const Jet& a, double s) {
    Jet out = a;
    out.value_ += s;
    return out;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }

  /// Scalar function composition f(u) given f(u0), f'(u0), f''(u0).
  friend Jet compose(const Jet& u, double f0, double f1, double f2) {
    const std::size_t n = u.dim();
    Jet out(f0, n);
    for (std::size_t i = 0; i < n; ++i) out.grad_[i] = f1 * u.grad_[i];
    if constexpr (Order == 2) {
      for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p; q < n; ++q) {
          const std::size_t k = packed_index(p, q);
          out.hess_[k] = f1 * u.hess_[k] + f2 * (u.grad_[p] * u.grad_[q]);
        }
      }
    }
    return out;
  }

  friend Jet reciprocal(const Jet& u) {
    if (u.value_ == 0.0) throw DomainError("division by zero");
    const double r = 1.0 / u.value_;
    return compose(u, r, -r * r, 2.0 * r * r * r);
  }

  friend Jet sin(const Jet& u) {
    const double s = std::sin(u.value_), c = std::cos(u.value_);
    return compose(u, s, c, -s);
  }
  friend Jet cos(const Jet& u) {
    const double s = std::sin(u.value_), c = std::cos(u.value_);
    return compose(u, c, -s, -c);
  }
  friend Jet exp(const Jet& u) {
    const double e = std::exp(u.value_);
    return compose(u, e, e, e);
  }
  friend Jet log(const Jet& u) {
    if (!(u.value_ > 0.0)) throw DomainError("log of non-positive value");
    const double r = 1.0 / u.value_;
    return compose(u, std::log(u.value_), r, -r * r);
  }
  friend Jet sqrt(const Jet& u) {
    if (!(u.value_ > 0.0)) throw DomainError("sqrt of non-positive value");
    const double s = std::sqrt(u.value_);
    return compose(u, s, 0.5 / s, -0.25 / (s * u.value_));
  }
  friend Jet tanh(const Jet& u) {
    const double t = std::tanh(u.value_);
    const double d = 1.0 - t * t;
    return compose(u, t, d, -2.0 * t * d);
  }

  /// u^m for integer m; any base, except zero with negative m.
  friend Jet pow_int(const Jet& u, long m) {
    if (m == 0) return Jet(1.0, u.dim());
    if (m == 1) return u;
    const double x = u.value_;
    if (x == 0.0 && m < 0) throw DomainError("negative power of zero");
    const double md = static_cast<double>(m);
    const double f0 = std::pow(x, md);
    const double f1 = md * std::pow(x, md - 1.0);
    const double f2 = (m == 1) ? 0.0 : md * (md - 1.0) * std::pow(x, md - 2.0);
    return compose(u, f0, f1, f2);
  }

  /// u^y for real y; requires u > 0 unless y is an integer constant.
  friend Jet pow(const Jet& u, const Jet& y) {
    check_dims(u, y);
    const bool constant_exponent = y.is_constant();
    if (constant_exponent && y.value_ == std::nearbyint(y.value_) && std::abs(y.value_) < 1e9) {
      return pow_int(u, static_cast<long>(y.value_));
    }
    if (!(u.value_ > 0.0)) {
      throw DomainError("pow with non-integer exponent requires a positive base");
    }
    if (constant_exponent) {
      const double x = u.value_, p = y.value_;
      return compose(u, std::pow(x, p), p * std::pow(x, p - 1.0),
                     p * (p - 1.0) * std::pow(x, p - 2.0));
    }
    return exp(y * log(u));
  }

  bool is_constant() const {
    for (double d : grad_) {
      if (d != 0.0) return false;
    }
    for (double d : hess_) {
      if (d != 0.0) return false;
    }
    return true;
  }

  bool is_finite() const {
    if (!std::isfinite(value_)) return false;
    for (double d : grad_) {
      if (!std::isfinite(d)) return false;
    }
    for (double d : hess_) {
      if (!std::isfinite(d)) return false;
    }
    return true;
  }

 private:
  template <int>
  friend class Jet;

  static std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }

  // Row-major upper triangle.
  static std::size_t packed_index(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return b * (b + 1) / 2 + a;
  }

  static void check_dims(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("jet dimension mismatch");
  }

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

/// Variable jet for coordinate `index` of an n-dimensional chart.
template <int Order>
Jet<Order> seed_variable(std::size_t index, double value, std::size_t dim) {
  return Jet<Order>::variable(index, value, dim);
}

enum class JetOp { add, sub, mul, div, neg, pow, sin, cos, exp, log, sqrt, tanh };

inline int arity(JetOp op) {
  switch (op) {
    case JetOp::add:
    case JetOp::sub:
    case JetOp::mul:
    case JetOp::div:
    case JetOp::pow:
      return 2;
    default:
      return 1;
  }
}

inline const char* to_string(JetOp op) {
  switch (op) {
    case JetOp::add: return "add";
    case JetOp::sub: return "sub";
    case JetOp::mul: return "mul";
    case JetOp::div: return "div";
    case JetOp::neg: return "neg";
    case JetOp::pow: return "pow";
    case JetOp::sin: return "sin";
    case JetOp::cos: return "cos";
    case JetOp::exp: return "exp";
    case JetOp::log: return "log";
    case JetOp::sqrt: return "sqrt";
    case JetOp::tanh: return "tanh";
  }
  return "?";
}

template <int Order>
Jet<Order> jet_apply(JetOp op, std::span<const Jet<Order>> args) {
  if (static_cast<int>(args.size()) != arity(op)) {
    throw std::invalid_argument(std::string("wrong argument count for ") + to_string(op));
  }
  switch (op) {
    case JetOp::add: return args[0] + args[1];
    case JetOp::sub: return args[0] - args[1];
    case JetOp::mul: return args[0] * args[1];
    case JetOp::div: return args[0] / args[1];
    case JetOp::pow: return pow(args[0], args[1]);
    case JetOp::neg: return -args[0];
    case JetOp::sin: return sin(args[0]);
    case JetOp::cos: return cos(args[0]);
    case JetOp::exp: return exp(args[0]);
    case JetOp::log: return log(args[0]);
    case JetOp::sqrt: return sqrt(args[0]);
    case JetOp::tanh: return tanh(args[0]);
  }
  throw std::invalid_argument("unknown jet op");
}

}  // namespace acs
