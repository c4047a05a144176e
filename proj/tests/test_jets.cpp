#include <array>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "acs/jet.hpp"
#include "acs/random.hpp"

using acs::Jet1;
using acs::Jet2;
using acs::JetOp;

TEST(Jets, SeedVariable) {
  const auto a = acs::seed_variable<1>(0, 3.0, 2);
  EXPECT_EQ(a.value(), 3.0);
  EXPECT_EQ(a.partial(0), 1.0);
  EXPECT_EQ(a.partial(1), 0.0);

  const auto b = acs::seed_variable<2>(1, -2.5, 3);
  EXPECT_EQ(b.value(), -2.5);
  EXPECT_EQ(b.partial(1), 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(b.hessian(i, j), 0.0);
  }
  EXPECT_THROW(acs::seed_variable<1>(5, 1.0, 4), std::out_of_range);
}

TEST(Jets, ApplyExamples) {
  const auto x = acs::seed_variable<1>(0, 3.0, 1);
  const std::array<Jet1, 2> xx{x, x};
  const auto sq = acs::jet_apply<1>(JetOp::mul, xx);
  EXPECT_EQ(sq.value(), 9.0);
  EXPECT_EQ(sq.partial(0), 6.0);

  const std::array<Jet1, 1> zero{acs::seed_variable<1>(0, 0.0, 1)};
  const auto s = acs::jet_apply<1>(JetOp::sin, zero);
  EXPECT_EQ(s.value(), 0.0);
  EXPECT_EQ(s.partial(0), 1.0);

  const std::array<Jet1, 1> y{acs::seed_variable<1>(0, 0.0, 2)};
  const std::array<Jet1, 1> ny{acs::jet_apply<1>(JetOp::neg, y)};
  const auto e = acs::jet_apply<1>(JetOp::exp, ny);
  EXPECT_EQ(e.value(), 1.0);
  EXPECT_EQ(e.partial(0), -1.0);
  EXPECT_EQ(e.partial(1), 0.0);
}

TEST(Jets, ArityAndDomainErrors) {
  const std::array<Jet1, 1> one{Jet1(1.0, 1)};
  EXPECT_THROW(acs::jet_apply<1>(JetOp::add, one), std::invalid_argument);

  const std::array<Jet1, 2> div0{Jet1(1.0, 1), Jet1(0.0, 1)};
  EXPECT_THROW(acs::jet_apply<1>(JetOp::div, div0), acs::DomainError);
  const std::array<Jet1, 1> neg{Jet1(-1.0, 1)};
  EXPECT_THROW(acs::jet_apply<1>(JetOp::log, neg), acs::DomainError);
  EXPECT_THROW(acs::jet_apply<1>(JetOp::sqrt, neg), acs::DomainError);
  const std::array<Jet1, 2> bad_pow{Jet1(-2.0, 1), Jet1(0.5, 1)};
  EXPECT_THROW(acs::jet_apply<1>(JetOp::pow, bad_pow), acs::DomainError);

  // integer exponent on a negative base is fine
  const std::array<Jet1, 2> int_pow{acs::seed_variable<1>(0, -2.0, 1), Jet1(3.0, 1)};
  const auto c = acs::jet_apply<1>(JetOp::pow, int_pow);
  EXPECT_EQ(c.value(), -8.0);
  EXPECT_EQ(c.partial(0), 12.0);
}

TEST(Jets, LinearityIsExact) {
  acs::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Jet1 a(rng.uniform(-1, 1), 3), b(rng.uniform(-1, 1), 3);
    a = a + rng.uniform(-2, 2) * acs::seed_variable<1>(0, 0.3, 3) + rng.uniform(-2, 2) * acs::seed_variable<1>(2, 0.1, 3);
    b = b * acs::seed_variable<1>(1, rng.uniform(0.5, 1.5), 3);
    const std::array<Jet1, 2> ab{a, b};
    const auto s = acs::jet_apply<1>(JetOp::add, ab);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.partial(i), a.partial(i) + b.partial(i));
  }
}

TEST(Jets, HessianOfProductIsUnitPattern) {
  const std::size_t n = 4;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto p = acs::seed_variable<2>(a, 0.7, n) * acs::seed_variable<2>(b, -1.3, n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double expect = 0.0;
          if ((i == a && j == b) || (i == b && j == a)) expect = a == b ? 2.0 : 1.0;
          EXPECT_EQ(p.hessian(i, j), expect) << a << b << i << j;
          EXPECT_EQ(p.hessian(i, j), p.hessian(j, i));
        }
      }
    }
  }
}

TEST(Jets, TruncateKeepsFirstOrder) {
  const auto x = acs::seed_variable<2>(0, 0.4, 2), y = acs::seed_variable<2>(1, 1.1, 2);
  const Jet2 f = sin(x * y) + exp(y);
  const Jet1 t = f.truncate();
  EXPECT_EQ(t.value(), f.value());
  EXPECT_EQ(t.partial(0), f.partial(0));
  EXPECT_EQ(t.partial(1), f.partial(1));
}

namespace {

struct Monomial {
  double coef;
  std::vector<int> exps;
};

template <class T>
T eval_poly(const std::vector<Monomial>& poly, const std::vector<T>& x, T zero) {
  T s = zero;
  for (const auto& m : poly) {
    T term = zero + m.coef;
    for (std::size_t v = 0; v < x.size(); ++v) {
      for (int e = 0; e < m.exps[v]; ++e) term = term * x[v];
    }
    s = s + term;
  }
  return s;
}

std::vector<Monomial> random_poly(acs::Rng& rng, std::size_t nvars) {
  std::vector<Monomial> poly;
  const int terms = 2 + static_cast<int>(rng.unit() * 6);
  for (int t = 0; t < terms; ++t) {
    Monomial m{rng.uniform(-2, 2), std::vector<int>(nvars, 0)};
    int budget = static_cast<int>(rng.unit() * 5);  // total degree <= 4
    for (std::size_t v = 0; v < nvars && budget > 0; ++v) {
      const int e = static_cast<int>(rng.unit() * (budget + 1));
      m.exps[v] = e;
      budget -= e;
    }
    poly.push_back(m);
  }
  return poly;
}

}  // namespace

TEST(Jets, PolynomialPartialsMatchFiniteDifferences) {
  acs::Rng rng(2024);
  const double h = 1e-5;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.unit() * 4);
    const auto poly = random_poly(rng, n);
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-1.5, 1.5);
    std::vector<Jet2> jx;
    for (std::size_t v = 0; v < n; ++v) jx.push_back(acs::seed_variable<2>(v, x[v], n));
    const Jet2 f = eval_poly(poly, jx, Jet2(0.0, n));
    EXPECT_NEAR(f.value(), eval_poly(poly, x, 0.0), 1e-12 * (1 + std::abs(f.value())));
    for (std::size_t a = 0; a < n; ++a) {
      auto xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      const double fd = (eval_poly(poly, xp, 0.0) - eval_poly(poly, xm, 0.0)) / (2 * h);
      EXPECT_LE(std::abs(f.partial(a) - fd), 1e-6 * std::max(1.0, std::abs(fd))) << "trial " << trial;
      for (std::size_t b = 0; b < n; ++b) {
        std::vector<Jet1> gp, gm;
        for (std::size_t v = 0; v < n; ++v) {
          gp.push_back(acs::seed_variable<1>(v, xp[v], n));
          gm.push_back(acs::seed_variable<1>(v, xm[v], n));
        }
        const double fd2 =
            (eval_poly(poly, gp, Jet1(0.0, n)).partial(b) - eval_poly(poly, gm, Jet1(0.0, n)).partial(b)) / (2 * h);
        EXPECT_LE(std::abs(f.hessian(a, b) - fd2), 1e-6 * std::max(1.0, std::abs(fd2)));
      }
    }
  }
}

TEST(Jets, ElementaryFunctionsMatchFiniteDifferences) {
  const double h = 1e-5;
  auto check = [&](auto fn, double x0) {
    const Jet2 f = fn(acs::seed_variable<2>(0, x0, 1));
    const double fp = fn(acs::seed_variable<2>(0, x0 + h, 1)).value();
    const double fm = fn(acs::seed_variable<2>(0, x0 - h, 1)).value();
    EXPECT_NEAR(f.partial(0), (fp - fm) / (2 * h), 1e-7 * (1 + std::abs(f.partial(0))));
    EXPECT_NEAR(f.hessian(0, 0), (fp - 2 * f.value() + fm) / (h * h), 1e-3 * (1 + std::abs(f.hessian(0, 0))));
  };
  check([](const Jet2& x) { return sin(x); }, 0.7);
  check([](const Jet2& x) { return cos(x); }, -0.4);
  check([](const Jet2& x) { return exp(x); }, 0.3);
  check([](const Jet2& x) { return log(x); }, 1.7);
  check([](const Jet2& x) { return sqrt(x); }, 2.2);
  check([](const Jet2& x) { return tanh(x); }, 0.5);
  check([](const Jet2& x) { return pow(x, Jet2(2.5, 1)); }, 1.3);
  check([](const Jet2& x) { return pow(Jet2(1.7, 1), x); }, 0.6);
  check([](const Jet2& x) { return Jet2(1.0, 1) / x; }, 0.8);
}

TEST(Jets, FiniteOnFiniteInputs) {
  const auto x = acs::seed_variable<2>(0, 0.9, 2), y = acs::seed_variable<2>(1, 0.2, 2);
  const Jet2 f = tanh(x / (y + 1.0)) * sqrt(x) + log(x * x + 1.0) - cos(y);
  EXPECT_TRUE(f.is_finite());
  EXPECT_FALSE(f.is_constant());
  EXPECT_TRUE(Jet2(4.0, 2).is_constant());
}
