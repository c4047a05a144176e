#pragma once

// Built-in structures: standard2n:<dim>, expblock4, shear4, pullback4.

#include <stdexcept>
#include <string>
#include <vector>

#include "acs/structure_file.hpp"

namespace acs {

inline std::vector<std::string> gallery_names() { return {"standard2n:<dim>", "expblock4", "shear4", "pullback4"}; }

inline StructureFile gallery(const std::string& name) {
  if (name.rfind("standard2n:", 0) == 0) {
    const std::string arg = name.substr(11);
    std::size_t dim = 0;
    try {
      std::size_t used = 0;
      dim = std::stoul(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw std::invalid_argument("standard2n needs an even dimension, got '" + arg + "'");
    }
    if (dim == 0 || dim % 2 != 0) throw std::invalid_argument("dimension must be even");
    const ChartSpec chart = ChartSpec::standard(dim);
    const Matrix j0 = standard_structure(dim);
    std::vector<Expr> entries(dim * dim, Expr::constant(0.0));
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double v = j0(i, j);
        if (v != 0.0) entries[i * dim + j] = v < 0 ? -Expr::constant(-v) : Expr::constant(v);
      }
    }
    return {name, "constant standard block structure", chart, MatrixField(chart, ExplicitJ{std::move(entries)}),
            MetricField::euclidean(chart)};
  }

  const ChartSpec chart = ChartSpec::standard(4);
  if (name == "expblock4") {
    std::vector<Expr> e(16, Expr::constant(0.0));
    e[0 * 4 + 1] = parse_expr("-1");
    e[1 * 4 + 0] = parse_expr("1");
    e[2 * 4 + 3] = parse_expr("-exp(x1)");
    e[3 * 4 + 2] = parse_expr("exp(-x1)");
    return {name, "J^3_4 = -exp(x1), J^4_3 = exp(-x1) beside a constant block", chart,
            MatrixField(chart, ExplicitJ{std::move(e)}), MetricField::euclidean(chart)};
  }
  if (name == "shear4") {
    std::vector<Expr> a(16, Expr::constant(0.0));
    for (std::size_t i = 0; i < 4; ++i) a[i * 4 + i] = Expr::constant(1.0);
    a[0 * 4 + 2] = parse_expr("x1");
    return {name, "conjugation of the standard structure by A = I + x1 E(1,3)", chart,
            MatrixField(chart, ConjugationJ{std::move(a), standard_structure(4)}), MetricField::euclidean(chart)};
  }
  if (name == "pullback4") {
    std::vector<Expr> phi = {parse_expr("x1"), parse_expr("x2 + x1^2"), parse_expr("x3"), parse_expr("x4 + x1*x3")};
    return {name, "pullback of the standard structure by (x1, x2 + x1^2, x3, x4 + x1*x3)", chart,
            MatrixField(chart, PullbackJ{std::move(phi), standard_structure(4)}), MetricField::euclidean(chart)};
  }
  throw std::invalid_argument("unknown gallery structure '" + name + "'");
}

}  // namespace acs
