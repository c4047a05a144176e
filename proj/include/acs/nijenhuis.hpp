#pragma once

// Nijenhuis tensor components, the symmetrized (4,0) tensor built from two
// nested applications of N_J, its metric double trace, and the Euclidean
// contraction N^r_ik N^s_ri J^k_s.

#include <cstddef>
#include <stdexcept>

#include "acs/geometry.hpp"
#include "acs/tensor.hpp"

namespace acs {

/// comps(k, i, j) = N^k_ij, the d_k component of N_J(d_i, d_j).
class NijenhuisComponents : public Tensor3 {
 public:
  using Tensor3::Tensor3;
};

/// comps(x, z, y, w) = N(e_x, e_z, e_y, e_w).
class BigN : public Tensor4 {
 public:
  using Tensor4::Tensor4;
};

/// N_J(X,Y) = [JX,JY] - J[X,JY] - J[JX,Y] - [X,Y] on coordinate fields:
///   N^k_ij = J^p_i d_p J^k_j - J^p_j d_p J^k_i - J^k_p d_i J^p_j + J^k_p d_j J^p_i.
inline NijenhuisComponents nijenhuis_standard(const JetMatrix& jm) {
  const std::size_t n = jm.dim();
  const Matrix& J = jm.values;
  const auto& d = jm.partials;
  NijenhuisComponents out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
          s += J(p, i) * d[p](k, j) - J(p, j) * d[p](k, i) - J(k, p) * d[i](p, j) + J(k, p) * d[j](p, i);
        }
        out(k, i, j) = s;
      }
    }
  }
  return out;
}

/// The form used in the obstruction derivation:
///   N^r_ik = J^p_i (d_p J^r_k - d_k J^r_p) - J^p_k (d_p J^r_i - d_i J^r_p).
/// Agrees with nijenhuis_standard only when d(J^2) = 0.
inline NijenhuisComponents nijenhuis_expanded_form(const JetMatrix& jm) {
  const std::size_t n = jm.dim();
  const Matrix& J = jm.values;
  const auto& d = jm.partials;
  NijenhuisComponents out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
          s += J(p, i) * (d[p](r, k) - d[k](r, p)) - J(p, k) * (d[p](r, i) - d[i](r, p));
        }
        out(r, i, k) = s;
      }
    }
  }
  return out;
}

/// N(X,Z,Y,W) = 1/4 { T(X,Z,Y,W) + T(Y,Z,X,W) + T(X,W,Y,Z) + T(Y,W,X,Z) },
/// T(X,Z,Y,W) = < J N_J(N_J(X,Z), Y), W >_g.
inline BigN big_n(const NijenhuisComponents& nij, const Matrix& j, const Matrix& g) {
  const std::size_t n = nij.dim();
  if (static_cast<std::size_t>(j.rows()) != n || static_cast<std::size_t>(g.rows()) != n) {
    throw std::invalid_argument("big_n: dimension mismatch");
  }
  // gj(w, s) = g_wt J^t_s, so T(x,z,y,w) = sum_{r,s} N^r_xz N^s_ry gj(w, s).
  const Matrix gj = g * j;
  Tensor4 t(n);
  std::vector<double> nested(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t s = 0; s < n; ++s) {
          double acc = 0.0;
          for (std::size_t r = 0; r < n; ++r) acc += nij(r, x, z) * nij(s, r, y);
          nested[s] = acc;
        }
        for (std::size_t w = 0; w < n; ++w) {
          double acc = 0.0;
          for (std::size_t s = 0; s < n; ++s) acc += gj(w, s) * nested[s];
          t(x, z, y, w) = acc;
        }
      }
    }
  }
  BigN out(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t w = 0; w < n; ++w) {
          // Pairing (first + fourth) and (second + third) keeps the value
          // bit-identical under the simultaneous swap X<->Y, Z<->W.
          out(x, z, y, w) = 0.25 * ((t(x, z, y, w) + t(y, w, x, z)) + (t(y, z, x, w) + t(x, w, y, z)));
        }
      }
    }
  }
  return out;
}

/// g^{ia} g^{kb} N(e_i, e_k, e_a, e_b): trace over slots (1,3), then (2,4).
inline double double_trace(const BigN& bn, const Matrix& g_inv) {
  const std::size_t n = bn.dim();
  if (static_cast<std::size_t>(g_inv.rows()) != n) throw std::invalid_argument("double_trace: dimension mismatch");
  if (!g_inv.allFinite()) throw SingularError("double_trace: singular metric");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) s += g_inv(i, a) * g_inv(k, b) * bn(i, k, a, b);
      }
    }
  }
  return s;
}

/// The literal index reading g^{ij} g^{kl} N(e_i, e_k, e_i, e_k), summed over
/// all of i, j, k, l. Coincides with double_trace when g is the identity.
inline double double_trace_literal(const BigN& bn, const Matrix& g_inv) {
  const std::size_t n = bn.dim();
  const Eigen::VectorXd row_sums = g_inv.rowwise().sum();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) s += row_sums(i) * row_sums(k) * bn(i, k, i, k);
  }
  return s;
}

/// sum_{i,k,r,s} N^r_ik N^s_ri J^k_s.
inline double contraction_scalar(const NijenhuisComponents& nij, const Matrix& j) {
  const std::size_t n = nij.dim();
  if (static_cast<std::size_t>(j.rows()) != n) throw std::invalid_argument("contraction: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t q = 0; q < n; ++q) s += nij(r, i, k) * nij(q, r, i) * j(k, q);
      }
    }
  }
  return s;
}

/// Sum of |summand| of the contraction: the scale against which rounding in
/// the contraction (and anything expanded from it) is measured.
inline double contraction_magnitude(const NijenhuisComponents& nij, const Matrix& j) {
  const std::size_t n = nij.dim();
  if (static_cast<std::size_t>(j.rows()) != n) throw std::invalid_argument("contraction: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t q = 0; q < n; ++q) s += std::abs(nij(r, i, k) * nij(q, r, i) * j(k, q));
      }
    }
  }
  return s;
}

}  // namespace acs
