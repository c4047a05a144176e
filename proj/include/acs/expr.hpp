#pragma once

// Expression language for structure-file entries.
//
// Grammar, lowest to highest precedence:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            (right-associative)
//   atom    := number | name | name '(' expr ')' | '(' expr ')'
//
// Functions: sin cos exp log sqrt tanh. Constants: pi e.
// Numbers: decimal with optional fraction and exponent (1, 2.5, .5, 3e-4).

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "acs/jet.hpp"

namespace acs {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised when an expression references a name the chart does not define.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Domain failure during evaluation, tagged with the failing subexpression.
class EvalError : public DomainError {
 public:
  EvalError(const std::string& what, std::string subexpression)
      : DomainError(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}
  const std::string& subexpression() const { return subexpression_; }

 private:
  std::string subexpression_;
};

enum class Func { sin, cos, exp, log, sqrt, tanh };

inline const char* to_string(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
    case Func::tanh: return "tanh";
  }
  return "?";
}

inline std::optional<Func> function_named(std::string_view name) {
  if (name == "sin") return Func::sin;
  if (name == "cos") return Func::cos;
  if (name == "exp") return Func::exp;
  if (name == "log") return Func::log;
  if (name == "sqrt") return Func::sqrt;
  if (name == "tanh") return Func::tanh;
  return std::nullopt;
}

/// True for names the grammar reserves (functions and constants).
inline bool is_reserved_name(std::string_view name) {
  return function_named(name).has_value() || name == "pi" || name == "e";
}

enum class BinaryOp { add, sub, mul, div, pow };

inline char symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Constant {
  double value;
};
struct Variable {
  std::string name;
};
struct Negate {
  NodePtr child;
};
struct Binary {
  BinaryOp op;
  NodePtr left, right;
};
struct Call {
  Func func;
  NodePtr arg;
};

struct Node {
  std::variant<Constant, Variable, Negate, Binary, Call> kind;
};

/// Immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double v) { return Expr(Node{Constant{v}}); }
  static Expr variable(std::string name) { return Expr(Node{Variable{std::move(name)}}); }
  static Expr negate(const Expr& e) { return Expr(Node{Negate{e.root_}}); }
  static Expr binary(BinaryOp op, const Expr& l, const Expr& r) {
    return Expr(Node{Binary{op, l.root_, r.root_}});
  }
  static Expr call(Func f, const Expr& arg) { return Expr(Node{Call{f, arg.root_}}); }

  const Node& root() const { return *root_; }

  /// Constant value if this tree is a bare constant.
  std::optional<double> as_constant() const {
    if (const auto* c = std::get_if<Constant>(&root_->kind)) return c->value;
    return std::nullopt;
  }

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(BinaryOp::add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(BinaryOp::sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(BinaryOp::mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(BinaryOp::div, a, b); }
  Expr operator-() const { return negate(*this); }

  friend bool operator==(const Expr& a, const Expr& b) { return equal(*a.root_, *b.root_); }

 private:
  explicit Expr(Node n) : root_(std::make_shared<const Node>(std::move(n))) {}

  static bool equal(const Node& a, const Node& b) {
    if (a.kind.index() != b.kind.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.kind);
          if constexpr (std::is_same_v<T, Constant>) {
            return x.value == y.value;
          } else if constexpr (std::is_same_v<T, Variable>) {
            return x.name == y.name;
          } else if constexpr (std::is_same_v<T, Negate>) {
            return equal(*x.child, *y.child);
          } else if constexpr (std::is_same_v<T, Binary>) {
            return x.op == y.op && equal(*x.left, *y.left) && equal(*x.right, *y.right);
          } else {
            return x.func == y.func && equal(*x.arg, *y.arg);
          }
        },
        a.kind);
  }

  NodePtr root_;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline int precedence(const Node& n) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Binary>) {
          switch (x.op) {
            case BinaryOp::add:
            case BinaryOp::sub: return 1;
            case BinaryOp::mul:
            case BinaryOp::div: return 2;
            case BinaryOp::pow: return 4;
          }
          return 0;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return 3;
        } else {
          return 5;
        }
      },
      n.kind);
}

inline void print(const Node& n, std::string& out);

inline void print_wrapped(const Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(n, out);
  if (wrap) out += ')';
}

inline void print(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Constant>) {
          out += format_number(x.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          out += x.name;
        } else if constexpr (std::is_same_v<T, Negate>) {
          out += '-';
          print_wrapped(*x.child, precedence(*x.child) < 3, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const int p = precedence(n);
          const int pl = precedence(*x.left);
          const int pr = precedence(*x.right);
          if (x.op == BinaryOp::pow) {
            // The base must be an atom; the exponent may be any unary.
            print_wrapped(*x.left, pl <= 4, out);
            out += '^';
            print_wrapped(*x.right, pr < 3, out);
          } else {
            // Left-associative: same precedence on the left needs no parens.
            print_wrapped(*x.left, pl < p, out);
            out += ' ';
            out += symbol(x.op);
            out += ' ';
            print_wrapped(*x.right, pr <= p, out);
          }
        } else {
          out += to_string(x.func);
          out += '(';
          print(*x.arg, out);
          out += ')';
        }
      },
      n.kind);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "expected expression, found end of input");
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "expected operator or end of input");
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = lhs + parse_product();
      } else if (accept('-')) {
        lhs = lhs - parse_product();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = lhs * parse_unary();
      } else if (accept('/')) {
        lhs = lhs / parse_unary();
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return Expr::negate(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (accept('^')) return Expr::binary(BinaryOp::pow, base, parse_unary());
    return base;
  }

  Expr parse_atom() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError(pos_, "expected number, name or '(', found end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
    throw ParseError(pos_, std::string("expected number, name or '(', found '") + c + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t nd = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw ParseError(start, "expected digits in number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      // Only an exponent if digits follow; otherwise leave 'e' for the caller to reject.
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      } else {
        throw ParseError(look, "expected digits in exponent");
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc() || !std::isfinite(v)) throw ParseError(start, "number out of range");
    return Expr::constant(v);
  }

  Expr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (auto f = function_named(name)) {
      if (!accept('(')) throw ParseError(pos_, "expected '(' after function " + name);
      Expr arg = parse_sum();
      if (!accept(')')) throw ParseError(pos_, "expected ')'");
      return Expr::call(*f, arg);
    }
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      throw ParseError(start, "unknown function '" + name + "'");
    }
    if (name == "pi") return Expr::constant(std::numbers::pi);
    if (name == "e") return Expr::constant(std::numbers::e);
    return Expr::variable(name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse an expression; throws ParseError carrying the byte offset.
inline Expr parse_expr(std::string_view text) { return detail::Parser(text).parse(); }

/// Text that parses back to a structurally identical tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e.root(), out);
  return out;
}

/// Names of all variables referenced, in first-occurrence order.
inline std::vector<std::string> variables_of(const Expr& e) {
  std::vector<std::string> names;
  auto walk = [&](auto&& self, const Node& n) -> void {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Variable>) {
            for (const auto& s : names) {
              if (s == x.name) return;
            }
            names.push_back(x.name);
          } else if constexpr (std::is_same_v<T, Negate>) {
            self(self, *x.child);
          } else if constexpr (std::is_same_v<T, Binary>) {
            self(self, *x.left);
            self(self, *x.right);
          } else if constexpr (std::is_same_v<T, Call>) {
            self(self, *x.arg);
          }
        },
        n.kind);
  };
  walk(walk, e.root());
  return names;
}

/// Expression with variable names resolved to coordinate slots.
class BoundExpr {
 public:
  BoundExpr() = default;

  BoundExpr(Expr expr, std::span<const std::string> var_names) : expr_(std::move(expr)) {
    for (const auto& name : variables_of(expr_)) {
      bool found = false;
      for (const auto& v : var_names) found = found || (v == name);
      if (!found) throw BindError("unbound variable '" + name + "'");
    }
    names_.assign(var_names.begin(), var_names.end());
  }

  const Expr& expr() const { return expr_; }
  std::size_t dim() const { return names_.size(); }

  template <int Order>
  Jet<Order> eval(std::span<const double> point) const {
    if (point.size() != names_.size()) throw std::invalid_argument("point dimension mismatch");
    return eval_node<Order>(expr_.root(), point);
  }

 private:
  template <int Order>
  Jet<Order> eval_node(const Node& n, std::span<const double> point) const {
    const std::size_t dim = names_.size();
    try {
      return std::visit(
          [&](const auto& x) -> Jet<Order> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Constant>) {
              return Jet<Order>(x.value, dim);
            } else if constexpr (std::is_same_v<T, Variable>) {
              std::size_t idx = 0;
              while (names_[idx] != x.name) ++idx;
              return seed_variable<Order>(idx, point[idx], dim);
            } else if constexpr (std::is_same_v<T, Negate>) {
              return -eval_node<Order>(*x.child, point);
            } else if constexpr (std::is_same_v<T, Binary>) {
              const Jet<Order> args[2] = {eval_node<Order>(*x.left, point),
                                          eval_node<Order>(*x.right, point)};
              return jet_apply<Order>(to_jet_op(x.op), args);
            } else {
              const Jet<Order> args[1] = {eval_node<Order>(*x.arg, point)};
              return jet_apply<Order>(to_jet_op(x.func), args);
            }
          },
          n.kind);
    } catch (const EvalError&) {
      throw;
    } catch (const DomainError& err) {
      std::string text;
      detail::print(n, text);
      throw EvalError(err.what(), text);
    }
  }

  static JetOp to_jet_op(BinaryOp op) {
    switch (op) {
      case BinaryOp::add: return JetOp::add;
      case BinaryOp::sub: return JetOp::sub;
      case BinaryOp::mul: return JetOp::mul;
      case BinaryOp::div: return JetOp::div;
      case BinaryOp::pow: return JetOp::pow;
    }
    return JetOp::add;
  }

  static JetOp to_jet_op(Func f) {
    switch (f) {
      case Func::sin: return JetOp::sin;
      case Func::cos: return JetOp::cos;
      case Func::exp: return JetOp::exp;
      case Func::log: return JetOp::log;
      case Func::sqrt: return JetOp::sqrt;
      case Func::tanh: return JetOp::tanh;
    }
    return JetOp::sin;
  }

  Expr expr_;
  std::vector<std::string> names_;
};

}  // namespace acs
