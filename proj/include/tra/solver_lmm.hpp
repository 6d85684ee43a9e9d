#pragma once

// Lagrange mesh method on the regularized Lagrange-Laguerre basis
//   phi_i(x) = (-1)^i x / (sqrt(x_i) (x - x_i)) e^{-x/2} L_M(x),
// x_i the zeros of L_M. With r = h x the problem is
//   [T / (2 h^2) + diag V(h x_i)] zeta = E Xi zeta,  Xi = I + s s^T,
//   s_i = (-1)^i / sqrt(x_i).

#include "tra/error.hpp"
#include "tra/linalg.hpp"
#include "tra/orthopoly.hpp"
#include "tra/potentials.hpp"
#include "tra/spectrum.hpp"

#include <cmath>
#include <vector>

namespace tra {

struct LmmConfig {
  int mesh_size = 50;
  /// Scale h (length): r = h x.
  double h = 0.1;

  void validate() const {
    if (mesh_size < 1)
      throw DomainError("LmmConfig: mesh_size must be >= 1");
    if (!(h > 0.0))
      throw DomainError("LmmConfig: h must be positive");
  }
};

struct LmmMatrices {
  std::vector<double> nodes;
  /// Kinetic matrix of -d^2/dx^2 in the (x-scaled) Lagrange basis.
  SymMatrix kinetic;
  /// V(h x_i).
  std::vector<double> potential;
  /// Overlap factor: Xi = I + s s^T.
  std::vector<double> s;

  [[nodiscard]] SymMatrix overlap() const {
    SymMatrix xi(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j)
        xi.set(i, j, (i == j ? 1.0 : 0.0) + s[i] * s[j]);
    return xi;
  }
};

/// Kinetic entries:
///   T_ii = (4 + (4M+2) x_i - x_i^2) / (12 x_i^2) - S_ii / 4
///   T_ij = [(x_i + x_j) / (x_i - x_j)^2 - 1/4] S_ij
/// with S_ij = s_i s_j.
inline LmmMatrices build_lmm_matrices(const PotentialSpec& p, const LmmConfig& c) {
  p.validate();
  c.validate();
  LmmMatrices out;
  out.nodes = laguerre_zeros(c.mesh_size);
  const auto m = out.nodes.size();
  const double dm = static_cast<double>(c.mesh_size);
  out.s.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    out.s[i] = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(out.nodes[i]);
  out.kinetic = SymMatrix(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double xi = out.nodes[i];
    out.kinetic.set(i, i, (4.0 + (4.0 * dm + 2.0) * xi - xi * xi) / (12.0 * xi * xi) -
                              0.25 * out.s[i] * out.s[i]);
    for (std::size_t j = 0; j < i; ++j) {
      const double xj = out.nodes[j];
      const double dx = xi - xj;
      out.kinetic.set(i, j, ((xi + xj) / (dx * dx) - 0.25) * out.s[i] * out.s[j]);
    }
  }
  out.potential.reserve(m);
  for (double x : out.nodes)
    out.potential.push_back(eval_potential(p, c.h * x));
  return out;
}

inline SpectrumResult lmm_spectrum(const PotentialSpec& p, const LmmConfig& c,
                                   Vectors want = Vectors::Compute) {
  auto mats = build_lmm_matrices(p, c);
  const double k = 1.0 / (2.0 * c.h * c.h);
  Eigen::MatrixXd dense = k * mats.kinetic.dense();
  mats.kinetic = SymMatrix();
  for (std::size_t i = 0; i < mats.nodes.size(); ++i)
    dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += mats.potential[i];
  const SymMatrix h = SymMatrix::from_lower(dense);
  dense.resize(0, 0);
  const auto pairs = generalized_sym_eigen_rank_one(h, mats.s, want);
  SpectrumResult out;
  out.method = Method::Lmm;
  out.basis_size = c.mesh_size;
  out.scale = c.h;
  return detail::split_bound_states(pairs, std::move(out));
}

} // namespace tra
