#pragma once

// Hamiltonian matrix diagonalization in the nonorthogonal Laguerre basis
//   chi_m(x) = C_m z^{(sigma+1)/2} e^{-z/2} L_m^sigma(z),  z = lambda x,
// with sigma chosen so the inverse-square part of V cancels the singular
// kinetic term: sigma = sqrt(1 + 8A) (Model I), sqrt(1 + 2A) (Model II).
// Matrices are in units where the common 1/lambda of dx = dz/lambda is
// dropped from both H and the overlap.

#include "tra/error.hpp"
#include "tra/linalg.hpp"
#include "tra/orthopoly.hpp"
#include "tra/potentials.hpp"
#include "tra/spectrum.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tra {

struct HmdConfig {
  int basis_size = 100;
  double lambda = 10.0;
  double sigma = 3.0;
  /// Gauss-Laguerre order for the potential integrals.
  int quad_points = 400;

  void validate() const {
    if (basis_size < 1)
      throw DomainError("HmdConfig: basis_size must be >= 1");
    if (!(lambda > 0.0))
      throw DomainError("HmdConfig: lambda must be positive");
    if (!(sigma > -1.0))
      throw DomainError("HmdConfig: sigma must exceed -1");
    if (quad_points < basis_size)
      throw DomainError("HmdConfig: quad_points (" + std::to_string(quad_points) +
                        ") must be at least basis_size (" + std::to_string(basis_size) + ")");
  }
};

inline double hmd_sigma(const PotentialSpec& p) {
  const double s2 = p.model == Model::I ? 1.0 + 8.0 * p.A : 1.0 + 2.0 * p.A;
  if (!(s2 >= 0.0))
    throw DomainError("hmd_sigma: 1 + 8A (Model I) or 1 + 2A (Model II) is negative");
  return std::sqrt(s2);
}

/// Config for `p` with sigma derived from A; quad_points <= 0 selects 4 M.
inline HmdConfig make_hmd_config(const PotentialSpec& p, int basis_size, double lambda,
                                 int quad_points = 0) {
  HmdConfig c;
  c.basis_size = basis_size;
  c.lambda = lambda;
  c.sigma = hmd_sigma(p);
  c.quad_points = quad_points > 0 ? quad_points : 4 * basis_size;
  c.validate();
  return c;
}

/// Overlap <chi_n|chi_m>: tridiagonal, positive definite.
inline SymMatrix build_overlap(const HmdConfig& c) {
  c.validate();
  const auto m = static_cast<std::size_t>(c.basis_size);
  SymMatrix omega(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double dn = static_cast<double>(n);
    omega.set(n, n, 2.0 * dn + c.sigma + 1.0);
    if (n > 0)
      omega.set(n, n - 1, -std::sqrt(dn * (dn + c.sigma)));
  }
  return omega;
}

/// Kinetic part (lambda^2/8) [(2n+sigma+1) delta + sqrt(n(n+sigma)) off-diagonals].
inline SymMatrix build_kinetic(const HmdConfig& c) {
  const auto m = static_cast<std::size_t>(c.basis_size);
  const double pre = c.lambda * c.lambda / 8.0;
  SymMatrix t(m);
  for (std::size_t n = 0; n < m; ++n) {
    const double dn = static_cast<double>(n);
    t.set(n, n, pre * (2.0 * dn + c.sigma + 1.0));
    if (n > 0)
      t.set(n, n - 1, pre * std::sqrt(dn * (dn + c.sigma)));
  }
  return t;
}

/// Potential remainder as a function g(z); H_pot(n,m) = <n|g|m> with the
/// z^sigma e^{-z} Laguerre weight.
inline std::function<double(double)> hmd_potential_kernel(const PotentialSpec& p,
                                                          const HmdConfig& c) {
  const double lam2 = c.lambda * c.lambda;
  const double la = c.lambda * p.a;
  if (p.model == Model::I) {
    const double k1 = lam2 * (2.0 * p.C - p.A);
    const double k2 = -2.0 * p.a * p.a * lam2 * lam2 * p.B;
    const double q0 = 2.0 * la * la;
    return [=](double z) {
      const double q = z * z + q0;
      return k1 * z / q + k2 * z / (q * q);
    };
  }
  const double k1 = -0.5 * lam2 * (p.A + 2.0 * p.B - 2.0 * p.C);
  const double k2 = 0.25 * lam2 * p.A;
  const double k3 = lam2 * p.B;
  return [=](double z) {
    const double u = z + 2.0 * la;
    const double v = z + la;
    return k1 / u + k2 * z / (u * u) + k3 * z / (v * v);
  };
}

inline SymMatrix build_hamiltonian(const PotentialSpec& p, const HmdConfig& c) {
  p.validate();
  c.validate();
  if (std::abs(c.sigma - hmd_sigma(p)) > 1e-12 * std::max(1.0, c.sigma))
    throw DomainError("build_hamiltonian: sigma does not match the potential's A");
  SymMatrix h = build_kinetic(c);
  const auto quad = laguerre_quadrature_matrix(c.basis_size, c.quad_points, c.sigma);
  const auto g = hmd_potential_kernel(p, c);
  Eigen::VectorXd gz(static_cast<Eigen::Index>(quad.nodes.size()));
  for (std::size_t k = 0; k < quad.nodes.size(); ++k)
    gz(static_cast<Eigen::Index>(k)) = g(quad.nodes[k]);
  const Eigen::MatrixXd pot = quad.values * gz.asDiagonal() * quad.values.transpose();
  const auto m = static_cast<std::size_t>(c.basis_size);
  for (std::size_t n = 0; n < m; ++n)
    for (std::size_t k = 0; k <= n; ++k)
      h.add(n, k, 0.5 * (pot(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) +
                         pot(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n))));
  return h;
}

inline SpectrumResult hmd_spectrum(const PotentialSpec& p, const HmdConfig& c,
                                   Vectors want = Vectors::Compute) {
  const auto pairs = generalized_sym_eigen(build_hamiltonian(p, c), build_overlap(c), want);
  SpectrumResult out;
  out.method = Method::Hmd;
  out.basis_size = c.basis_size;
  out.scale = c.lambda;
  out.quad_points = c.quad_points;
  return detail::split_bound_states(pairs, std::move(out));
}

/// psi(x) = sqrt(lambda) sum_m v_m chi_m(lambda x) for an eigenvector v of the
/// generalized problem. The overlap lives in z = lambda x, so the sqrt(lambda)
/// makes an Omega-normalized v give a psi normalized in x.
inline std::vector<double> hmd_wavefunction(const HmdConfig& c, const Eigen::VectorXd& v,
                                            std::span<const double> x_grid) {
  c.validate();
  if (v.size() != c.basis_size)
    throw DomainError("hmd_wavefunction: coefficient count must equal basis_size");
  std::vector<double> out;
  out.reserve(x_grid.size());
  const double log_c0 = -0.5 * std::lgamma(c.sigma + 1.0) + 0.5 * std::log(c.lambda);
  for (double x : x_grid) {
    if (!(x > 0.0)) {
      out.push_back(0.0);
      continue;
    }
    const double z = c.lambda * x;
    // Orthonormal recursion for C_m L_m times the envelope.
    double prev = 0.0;
    double cur = std::exp(log_c0 + 0.5 * (c.sigma + 1.0) * std::log(z) - 0.5 * z);
    double sum = v(0) * cur;
    for (int m = 0; m + 1 < c.basis_size; ++m) {
      const double dm = m;
      const double next = ((2.0 * dm + 1.0 + c.sigma - z) * cur -
                           std::sqrt(dm * (dm + c.sigma)) * prev) /
                          std::sqrt((dm + 1.0) * (dm + c.sigma + 1.0));
      prev = cur;
      cur = next;
      sum += v(m + 1) * cur;
    }
    out.push_back(sum);
  }
  return out;
}

} // namespace tra
