#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "acs/gallery.hpp"
#include "acs/geometry.hpp"
#include "acs/nijenhuis.hpp"
#include "acs/obstruction.hpp"
#include "acs/selftest.hpp"
#include "oracle.hpp"

using acs::ChartSpec;
using acs::Expr;
using acs::Matrix;
using acs::parse_expr;

namespace {

std::vector<Expr> parse_all(std::initializer_list<const char*> texts) {
  std::vector<Expr> out;
  for (const char* t : texts) out.push_back(parse_expr(t));
  return out;
}

std::vector<double> random_point(acs::Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
  std::vector<double> p(n);
  for (double& x : p) x = rng.uniform(lo, hi);
  return p;
}

}  // namespace

TEST(Chart, Validation) {
  EXPECT_THROW(ChartSpec(3, {"a", "b", "c"}), std::invalid_argument);
  EXPECT_THROW(ChartSpec(2, {"a"}), std::invalid_argument);
  EXPECT_THROW(ChartSpec(2, {"a", "a"}), std::invalid_argument);
  EXPECT_THROW(ChartSpec(2, {"a", "sin"}), std::invalid_argument);
  EXPECT_THROW(ChartSpec(2, {"a", "pi"}), std::invalid_argument);
  EXPECT_THROW(ChartSpec(2, {"a", "1b"}), std::invalid_argument);
  EXPECT_NO_THROW(ChartSpec(2, {"u", "v_2"}));
  EXPECT_EQ(ChartSpec::standard(4).var_names(), (std::vector<std::string>{"x1", "x2", "x3", "x4"}));
}

TEST(Fields, ExplicitConstant) {
  const auto chart = ChartSpec::standard(2);
  const acs::MatrixField f(chart, acs::ExplicitJ{parse_all({"0", "-1", "1", "0"})});
  const auto jm = acs::eval_field(f, chart, std::vector<double>{0.3, -2.0});
  EXPECT_EQ(jm.values, acs::standard_structure(2));
  for (const auto& p : jm.partials) EXPECT_EQ(acs::max_abs(p), 0.0);
  EXPECT_THROW(acs::eval_field(f, ChartSpec(2, {"u", "v"}), std::vector<double>{0, 0}), std::invalid_argument);
  EXPECT_THROW(f.eval(std::vector<double>{0.0}), std::invalid_argument);
}

TEST(Fields, StandardStructureLayout) {
  const Matrix j0 = acs::standard_structure(4);
  EXPECT_EQ(j0(1, 0), 1.0);
  EXPECT_EQ(j0(0, 1), -1.0);
  EXPECT_EQ(j0(3, 2), 1.0);
  EXPECT_EQ(j0(2, 3), -1.0);
  EXPECT_EQ(acs::max_abs(j0 * j0 + Matrix::Identity(4, 4)), 0.0);
}

TEST(Fields, IdentityConjugation) {
  const auto chart = ChartSpec::standard(4);
  std::vector<Expr> a(16, Expr::constant(0.0));
  for (int i = 0; i < 4; ++i) a[i * 5] = Expr::constant(1.0);
  const acs::MatrixField f(chart, acs::ConjugationJ{a, acs::standard_structure(4)});
  const auto jm = f.eval(std::vector<double>{0.1, 0.2, 0.3, 0.4});
  EXPECT_EQ(jm.values, acs::standard_structure(4));
  for (const auto& p : jm.partials) EXPECT_EQ(acs::max_abs(p), 0.0);
  EXPECT_EQ(jm.condition, 1.0);
}

TEST(Fields, ExpblockAtOrigin) {
  const auto s = acs::gallery("expblock4");
  const auto jm = s.j.eval(std::vector<double>{0, 0, 0, 0});
  EXPECT_EQ(jm.values(2, 3), -1.0);
  EXPECT_EQ(jm.values(3, 2), 1.0);
  EXPECT_EQ(jm.partials[0](2, 3), -1.0);
  EXPECT_EQ(jm.partials[0](3, 2), -1.0);
  EXPECT_TRUE(acs::validate_acs(jm, 1e-9).ok);
}

TEST(Fields, SingularConjugation) {
  const auto chart = ChartSpec::standard(2);
  const acs::MatrixField f(chart, acs::ConjugationJ{parse_all({"x1", "0", "0", "1"}), acs::standard_structure(2)});
  EXPECT_THROW(f.eval(std::vector<double>{0.0, 0.0}), acs::SingularError);
  EXPECT_NO_THROW(f.eval(std::vector<double>{1.0, 0.0}));
}

TEST(Fields, ProceduralPartialsMatchOracle) {
  acs::Rng rng(5);
  for (const char* name : {"shear4", "pullback4"}) {
    const auto s = acs::gallery(name);
    for (int t = 0; t < 5; ++t) {
      const auto x = random_point(rng, 4, -1.0, 1.0);
      const auto jm = s.j.eval(x);
      const auto fd = oracle::partials(oracle::values_of(s.j), x);
      for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(oracle::rel_diff(jm.partials[k], fd[k]), 1e-6) << name;
    }
  }
  for (int t = 0; t < 5; ++t) {
    const auto f = acs::random_conjugation_acs(6, 3, 100 + t);
    const auto x = random_point(rng, 6);
    const auto jm = f.eval(x);
    const auto fd = oracle::partials(oracle::values_of(f), x);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_LE(oracle::rel_diff(jm.partials[k], fd[k]), 1e-5);
  }
}

TEST(Fields, PullbackIsIntegrable) {
  acs::Rng rng(11);
  const auto s = acs::gallery("pullback4");
  for (int t = 0; t < 100; ++t) {
    const auto x = random_point(rng, 4, -2.0, 2.0);
    const auto jm = s.j.eval(x);
    EXPECT_TRUE(acs::validate_acs(jm, 1e-9).ok);
    EXPECT_LE(acs::nijenhuis_standard(jm).max_abs(), 1e-8);
    EXPECT_GE(jm.condition, 1.0);
  }
}

TEST(Validate, Examples) {
  EXPECT_TRUE(acs::validate_acs(acs::JetMatrix::constant(acs::standard_structure(2)), 1e-9).ok);
  const auto bad = acs::validate_acs(acs::JetMatrix::constant(Matrix::Identity(2, 2)), 1e-9);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.residual, 2.0);
  Matrix block(2, 2);
  block << 0, -std::exp(0.0), std::exp(-0.0), 0;
  EXPECT_TRUE(acs::validate_acs(acs::JetMatrix::constant(block), 1e-9).ok);
}

TEST(RandomConjugation, DeterministicAndValid) {
  EXPECT_EQ(acs::random_conjugation_acs(4, 2, 42), acs::random_conjugation_acs(4, 2, 42));
  EXPECT_FALSE(acs::random_conjugation_acs(4, 2, 42) == acs::random_conjugation_acs(4, 2, 43));
  EXPECT_THROW(acs::random_conjugation_acs(3, 2, 42), std::invalid_argument);
  acs::Rng rng(3);
  for (std::size_t dim : {2, 4, 6}) {
    const auto f = acs::random_conjugation_acs(dim, 2, 7 * dim);
    for (int t = 0; t < 100; ++t) {
      EXPECT_TRUE(acs::validate_acs(f.eval(random_point(rng, dim)), 1e-9).ok);
    }
  }
}

TEST(RandomConjugation, DegreeZeroIsConstant) {
  const auto f = acs::random_conjugation_acs(4, 0, 1);
  const auto jm = f.eval(std::vector<double>{0.2, 0.4, 0.6, 0.8});
  for (const auto& p : jm.partials) EXPECT_EQ(acs::max_abs(p), 0.0);
  EXPECT_EQ(acs::nijenhuis_standard(jm).max_abs(), 0.0);
}

TEST(Metric, SymmetryAndDefiniteness) {
  const auto chart = ChartSpec::standard(2);
  const acs::MetricField asym(chart, parse_all({"1", "x1", "0", "1"}));
  EXPECT_THROW(asym.eval(std::vector<double>{0.5, 0}), std::invalid_argument);
  const acs::MetricField indefinite(chart, parse_all({"1", "0", "0", "x2"}));
  EXPECT_THROW(indefinite.eval(std::vector<double>{0, -1}), acs::SingularError);
  EXPECT_NO_THROW(indefinite.eval(std::vector<double>{0, 2}));
}

TEST(Christoffel, Examples) {
  const auto chart = ChartSpec::standard(2);
  const auto euclid = acs::christoffel(acs::MetricField::euclidean(chart).eval(std::vector<double>{1, 2}));
  EXPECT_EQ(euclid.max_abs(), 0.0);

  const acs::MetricField g1(chart, parse_all({"1", "0", "0", "x1^2"}));
  const auto c1 = acs::christoffel(g1.eval(std::vector<double>{2, 0}));
  EXPECT_NEAR(c1(0, 1, 1), -2.0, 1e-15);
  EXPECT_NEAR(c1(1, 0, 1), 0.5, 1e-15);
  EXPECT_EQ(c1(1, 0, 1), c1(1, 1, 0));

  const acs::MetricField g2(chart, parse_all({"exp(2*x1)", "0", "0", "exp(2*x1)"}));
  const auto c2 = acs::christoffel(g2.eval(std::vector<double>{0, 0}));
  EXPECT_NEAR(c2(0, 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(c2(0, 1, 1), -1.0, 1e-15);
  EXPECT_NEAR(c2(1, 0, 1), 1.0, 1e-15);
}

TEST(Christoffel, MatchesOracleAndIsSymmetric) {
  acs::Rng rng(17);
  for (std::size_t dim : {2, 4}) {
    const auto chart = ChartSpec::standard(dim);
    for (int t = 0; t < 10; ++t) {
      const auto x = random_point(rng, dim);
      const auto g = acs::random_spd_metric_at(chart, 1000 + t, x);
      const auto gamma = acs::christoffel(g.eval(x));
      const auto fd = oracle::christoffel(oracle::values_of(g), x);
      for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t i = 0; i < dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) {
            EXPECT_EQ(gamma(k, i, j), gamma(k, j, i));
            EXPECT_LE(oracle::rel_diff(gamma(k, i, j), fd[k](i, j)), 1e-6);
          }
        }
      }
    }
  }
}

TEST(NormalTransform, EuclideanIsIdentity) {
  const auto f = acs::random_conjugation_acs(4, 2, 9);
  const std::vector<double> x = {0.1, 0.5, 0.9, 0.3};
  const auto jm = f.eval(x);
  const auto g = acs::MetricField::euclidean(f.chart()).eval(x);
  const auto jn = acs::normal_transform(jm, g);
  EXPECT_EQ(acs::max_abs(jn.values - jm.values), 0.0);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(acs::max_abs(jn.partials[k] - jm.partials[k]), 0.0);
}

TEST(NormalTransform, MetricBecomesFlatAtThePoint) {
  acs::Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = 2 + 2 * static_cast<std::size_t>(t % 3);
    const auto chart = ChartSpec::standard(dim);
    const auto x = random_point(rng, dim);
    const auto g = acs::random_spd_metric_at(chart, 5000 + t, x).eval(x);
    const auto frame = acs::normal_frame(g);
    const auto gt = acs::transform_metric(g, frame);
    EXPECT_LE(acs::max_abs(gt.values - Matrix::Identity(dim, dim)), 1e-10);
    EXPECT_LE(acs::christoffel(gt).max_abs(), 1e-8);
  }
}

TEST(NormalTransform, MatchesFiniteDifferenceCoordinateChange) {
  acs::Rng rng(29);
  for (std::size_t dim : {2, 4, 6}) {
    const auto chart = ChartSpec::standard(dim);
    for (int t = 0; t < 4; ++t) {
      const auto field = acs::random_conjugation_acs(dim, 2, 300 + t);
      const auto x = random_point(rng, dim);
      const auto gf = acs::random_spd_metric_at(chart, 400 + t, x);
      const auto jn = acs::normal_transform(field.eval(x), gf.eval(x));

      const auto chart_fd = oracle::normal_chart(oracle::values_of(gf), x);
      const auto jt = chart_fd.endomorphism(oracle::values_of(field));
      const std::vector<double> origin(dim, 0.0);
      EXPECT_LE(oracle::rel_diff(jn.values, jt(origin)), 1e-12);
      const auto fd = oracle::partials(jt, origin);
      for (std::size_t c = 0; c < dim; ++c) EXPECT_LE(oracle::rel_diff(jn.partials[c], fd[c]), 1e-5) << dim;

      const auto gt = chart_fd.metric(oracle::values_of(gf));
      for (const auto& dg : oracle::partials(gt, origin)) EXPECT_LE(acs::max_abs(dg), 1e-5);
    }
  }
}

// expblock4 under g = diag(1, x1^2, 1, 1) at (1, 0, 0, 0): L_J of the
// transformed jets against L_J of the numerically re-parameterized field.
TEST(NormalTransform, ExpblockWithWarpedMetric) {
  const auto s = acs::gallery("expblock4");
  const acs::MetricField g(s.chart, parse_all({"1", "0", "0", "0", "0", "x1^2", "0", "0", "0", "0", "1", "0", "0",
                                               "0", "0", "1"}));
  const std::vector<double> x = {1, 0, 0, 0};
  const double lj = acs::l_j_formula(acs::normal_transform(s.j.eval(x), g.eval(x)));
  const auto chart_fd = oracle::normal_chart(oracle::values_of(g), x);
  const double lj_fd = oracle::l_j(chart_fd.endomorphism(oracle::values_of(s.j)), std::vector<double>(4, 0.0));
  EXPECT_LE(oracle::rel_diff(lj, lj_fd), 1e-5);
  // frozen anchor: L_J vanishes here although N does not
  EXPECT_NEAR(lj, 0.0, 1e-12);
  EXPECT_GT(acs::nijenhuis_standard(acs::normal_transform(s.j.eval(x), g.eval(x))).max_abs(), 1.0);
}
