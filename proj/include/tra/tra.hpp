#pragma once

// Tridiagonal representation of the two potentials: Jacobi basis parameters,
// the three-term recursion for the expansion coefficients, the TRA
// polynomials H / H-tilde, and finite-series wavefunction assembly.
//
// Basis: phi_n(y) = (y-1)^alpha (y+1)^(-beta) Q_n^{(mu,nu)}(y), n = 0..N.
// Model I uses y = (x/a)^2 + 1, Model II uses y = 2 (x/a + 1)^2 - 1. The wave
// operator acts on phi_n as W(y) [d_n phi_n + c_{n-1} phi_{n-1} + b_n phi_{n+1}],
// so psi = sum f_n phi_n solves the wave equation when
//   d_n F_n + b_{n-1} F_{n-1} + c_n F_{n+1} = 0,  F_0 = 1.

#include "tra/error.hpp"
#include "tra/orthopoly.hpp"
#include "tra/potentials.hpp"
#include "tra/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace tra {

struct TraBasis {
  Model model = Model::I;
  double mu = 0.0;
  double nu = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int nmax = 0;

  /// Largest number of bound states the finite series can carry (N + 1).
  [[nodiscard]] int capacity() const noexcept { return nmax + 1; }
  [[nodiscard]] JacobiParams jacobi() const { return {mu, nu, nmax}; }
};

/// mu, nu from the linearity constraint, signs fixed by mu > -1 and
/// mu + nu < -2N - 1; N is the largest integer strictly below -(mu+nu+1)/2.
inline TraBasis basis_for(const PotentialSpec& p) {
  p.validate();
  if (!(p.A > 0.0) || !(p.B > 0.0))
    throw DomainError("basis_for: couplings A and B must be positive");
  TraBasis b;
  b.model = p.model;
  if (p.model == Model::I) {
    b.mu = std::sqrt(2.0 * p.A + 0.25);
    b.nu = -std::sqrt(2.0 * p.B + 1.0);
    b.alpha = 0.5 * (b.mu + 0.5);
    b.beta = 0.5 * (-b.nu - 1.0);
  } else {
    b.mu = std::sqrt(2.0 * p.A + 1.0);
    b.nu = -std::sqrt(2.0 * p.B + 0.25);
    b.alpha = 0.5 * (b.mu + 1.0);
    b.beta = 0.5 * (-b.nu - 0.5);
  }
  const double t = -0.5 * (b.mu + b.nu + 1.0);
  if (!(t > 0.0))
    throw DomainError("basis_for: no TRA-representable bound states (mu + nu >= -1)");
  b.nmax = static_cast<int>(std::ceil(t)) - 1;
  return b;
}

struct RecursionCoeffs {
  std::vector<double> d;  // n = 0..N
  std::vector<double> b;  // n = 0..N-1
  std::vector<double> c;  // n = 0..N-1
  double epsilon = 0.0;   // a^2 E
  double gamma2 = 1.0 / 16.0;
  /// b_n c_n > 0 for every n < N.
  bool favard_positive = false;
};

namespace detail {

inline double tra_upper(const TraBasis& basis, int n) {
  return JacobiRecursion{basis.mu, basis.nu}.upper(n);
}

inline double tra_c(const TraBasis& basis, int n) {
  const double s = basis.mu + basis.nu;
  return 2.0 * (n + basis.mu + 1.0) * (n + basis.nu + 1.0) /
         ((2.0 * n + s + 2.0) * (2.0 * n + s + 3.0));
}

} // namespace detail

inline RecursionCoeffs recursion_coeffs(const TraBasis& basis, double epsilon,
                                        double c_coupling) {
  if (epsilon == 0.0 || !std::isfinite(epsilon))
    throw DomainError("recursion_coeffs: epsilon must be finite and nonzero");
  RecursionCoeffs rc;
  rc.epsilon = epsilon;
  const int n_top = basis.nmax;
  const double s = basis.mu + basis.nu;
  const JacobiRecursion jr{basis.mu, basis.nu};
  for (int n = 0; n <= n_top; ++n) {
    const double k = 2.0 * n + s + 1.0;
    const double bracket = basis.model == Model::I
                               ? 0.5 * (k * k - 0.25) + epsilon - 2.0 * c_coupling
                               : k * k - 0.25 - (2.0 * c_coupling + epsilon);
    rc.d.push_back(bracket / epsilon + jr.diag(n));
  }
  rc.favard_positive = true;
  for (int n = 0; n < n_top; ++n) {
    rc.b.push_back(detail::tra_upper(basis, n));
    rc.c.push_back(detail::tra_c(basis, n));
    if (!(rc.b.back() * rc.c.back() > 0.0))
      rc.favard_positive = false;
  }
  return rc;
}

enum class TraBranch { Hyperbolic, Trigonometric };

/// Argument z and angle theta of H-tilde (hyperbolic) or H (trigonometric).
/// `cos_like` is cosh(theta) or cos(theta); `sin_like` is sinh(theta) >= 0 or
/// sin(theta) >= 0, computed directly from cos_like.
struct TraPolyArgs {
  double z = 0.0;
  double theta = 0.0;
  double cos_like = 1.0;
  double sin_like = 0.0;
  TraBranch branch = TraBranch::Hyperbolic;
};

namespace detail {

inline TraPolyArgs hyperbolic_args(double z2, double ch) {
  if (!(z2 > 0.0) || !(ch >= 1.0))
    throw NumericalError("tra_poly_args: hyperbolic branch out of range (cosh theta = " +
                         std::to_string(ch) + ")");
  TraPolyArgs out;
  out.branch = TraBranch::Hyperbolic;
  out.z = std::sqrt(z2);
  out.cos_like = ch;
  out.sin_like = std::sqrt((ch - 1.0) * (ch + 1.0));
  out.theta = std::log(ch + out.sin_like);
  return out;
}

inline TraPolyArgs trigonometric_args(double z2, double cs) {
  if (!(z2 > 0.0) || !(std::abs(cs) <= 1.0))
    throw NumericalError("tra_poly_args: trigonometric branch out of range (cos theta = " +
                         std::to_string(cs) + ")");
  TraPolyArgs out;
  out.branch = TraBranch::Trigonometric;
  out.z = std::sqrt(z2);
  out.cos_like = cs;
  out.sin_like = std::sqrt((1.0 - cs) * (1.0 + cs));
  out.theta = std::acos(cs);
  return out;
}

} // namespace detail

inline TraPolyArgs tra_poly_args(const TraBasis& basis, double epsilon, double c_coupling) {
  if (!(epsilon < 0.0))
    throw DomainError("tra_poly_args: epsilon must be negative");
  if (!(c_coupling > 0.0))
    throw DomainError("tra_poly_args: coupling C must be positive");
  const double c = c_coupling;
  if (basis.model == Model::I)
    return detail::hyperbolic_args(1.0 / (c * (c - epsilon)), (epsilon - 2.0 * c) / epsilon);
  if (std::abs(epsilon + c) < 1e-12 * c)
    throw DomainError("tra_poly_args: epsilon at the branch point -C");
  const double ratio = (epsilon + 2.0 * c) / (-epsilon);
  if (epsilon > -c)
    return detail::hyperbolic_args(4.0 / (c * (c + epsilon)), ratio);
  return detail::trigonometric_args(-4.0 / (c * (c + epsilon)), ratio);
}

/// H_0..H_N (or H-tilde) by forward recursion solved for the (n+1) term.
inline std::vector<double> tra_poly_all(const TraPolyArgs& args, const TraBasis& basis,
                                        double gamma = 0.25) {
  const JacobiRecursion jr{basis.mu, basis.nu};
  const double half = 0.5 * (basis.mu + basis.nu + 1.0);
  std::vector<double> h{1.0};
  double prev = 0.0;
  for (int n = 0; n < basis.nmax; ++n) {
    const double up = jr.upper(n);
    if (up == 0.0 || !std::isfinite(up))
      throw DomainError("tra_poly: vanishing recursion coefficient at n = " +
                        std::to_string(n));
    const double shift = (n + half) * (n + half) - gamma * gamma;
    const double diag = shift * args.z * args.sin_like - jr.diag(n) - args.cos_like;
    const double low = n == 0 ? 0.0 : jr.lower(n) * prev;
    const double next = (diag * h.back() - low) / up;
    prev = h.back();
    h.push_back(next);
  }
  return h;
}

inline double tra_poly(int n, const TraPolyArgs& args, const TraBasis& basis,
                       double gamma = 0.25) {
  if (n < 0 || n > basis.nmax)
    throw DomainError("tra_poly: degree outside 0..N");
  return tra_poly_all(args, basis, gamma)[static_cast<std::size_t>(n)];
}

/// F_0..F_N from the three-term recursion with F_0 = 1.
inline std::vector<double> expansion_coeffs(const RecursionCoeffs& rc) {
  std::vector<double> f{1.0};
  for (std::size_t n = 0; n + 1 < rc.d.size(); ++n) {
    if (rc.c[n] == 0.0)
      throw DomainError("expansion_coeffs: c_n vanishes at n = " + std::to_string(n));
    const double low = n == 0 ? 0.0 : rc.b[n - 1] * f[n - 1];
    f.push_back(-(rc.d[n] * f[n] + low) / rc.c[n]);
  }
  return f;
}

/// G_n with P_n = G_n F_n.
inline double g_weight(int n, const TraBasis& basis) {
  if (n < 0 || n > basis.nmax)
    throw DomainError("g_weight: degree outside 0..N");
  const double s = basis.mu + basis.nu;
  const double den = pochhammer(1.0, n) * pochhammer(s + 1.0, n) * (2.0 * n + s + 1.0);
  if (den == 0.0)
    throw DomainError("g_weight: vanishing Pochhammer denominator");
  return pochhammer(basis.mu + 1.0, n) * pochhammer(basis.nu + 1.0, n) * (s + 1.0) / den;
}

/// Coordinate map x -> y and its first two x-derivatives.
struct CoordinateMap {
  double y = 1.0;
  double dy = 0.0;
  double d2y = 0.0;
};

inline CoordinateMap coordinate_map(Model model, double a, double x) {
  const double r = x / a;
  if (model == Model::I)
    return {r * r + 1.0, 2.0 * r / a, 2.0 / (a * a)};
  return {2.0 * (r + 1.0) * (r + 1.0) - 1.0, 4.0 * (r + 1.0) / a, 4.0 / (a * a)};
}

/// Un-normalized k-th bound state (f_0 = 1) as a finite TRA series.
struct WavefunctionSeries {
  TraBasis basis;
  double energy = 0.0;
  double epsilon = 0.0;
  TraPolyArgs args;
  /// f_n / f_0 = H_n / G_n.
  std::vector<double> coeffs;
  int node_index = -1;
  double a = 1.0;

  /// psi(x); x >= 0.
  [[nodiscard]] double operator()(double x) const {
    if (!(x >= 0.0))
      throw DomainError("WavefunctionSeries: x must be non-negative");
    if (x == 0.0)
      return 0.0;
    const auto map = coordinate_map(basis.model, a, x);
    const auto q = jacobi_q_all(basis.jacobi(), map.y);
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
      sum += coeffs[n] * q[n];
    const double r = x / a;
    if (basis.model == Model::I)
      return std::pow(r, basis.mu + 0.5) * std::pow(r * r + 2.0, 0.5 * (basis.nu + 1.0)) * sum;
    return std::pow(2.0, 0.5 * (basis.mu + basis.nu) + 0.75) * std::pow(r + 1.0, basis.nu + 0.5) *
           std::pow(r * r + 2.0 * r, 0.5 * (basis.mu + 1.0)) * sum;
  }
};

/// Assembles the series for energy E (atomic units) with f_0 = 1. The
/// energy comes from a numerical solver.
inline WavefunctionSeries tra_series(const PotentialSpec& p, double energy, int node_index = -1) {
  if (!(energy < 0.0))
    throw DomainError("wavefunction: bound-state energy must be negative");
  WavefunctionSeries w;
  w.basis = basis_for(p);
  w.energy = energy;
  w.epsilon = p.a * p.a * energy;
  w.args = tra_poly_args(w.basis, w.epsilon, p.C);
  w.node_index = node_index;
  w.a = p.a;
  const auto h = tra_poly_all(w.args, w.basis);
  for (int n = 0; n <= w.basis.nmax; ++n)
    w.coeffs.push_back(h[static_cast<std::size_t>(n)] / g_weight(n, w.basis));
  return w;
}

struct SampledWavefunction {
  WavefunctionSeries series;
  std::vector<double> values;
};

inline SampledWavefunction wavefunction(const PotentialSpec& p, double energy,
                                        std::span<const double> x_grid, int node_index = -1) {
  SampledWavefunction out{tra_series(p, energy, node_index), {}};
  out.values.reserve(x_grid.size());
  for (double x : x_grid)
    out.values.push_back(out.series(x));
  return out;
}

/// L2 norm over [0, inf) by adaptive quadrature.
inline double l2_norm(const WavefunctionSeries& w) {
  const auto sq = [&](double x) {
    const double v = w(x);
    return v * v;
  };
  const double inner = integrate(sq, 0.0, w.a, 1e-14, 1e-11).value;
  const double outer = integrate(sq, w.a, std::numeric_limits<double>::infinity(), 1e-14, 1e-11).value;
  return std::sqrt(inner + outer);
}

/// phi_n(x) and its first two x-derivatives.
struct BasisValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline BasisValue basis_function(const TraBasis& basis, double a, int n, double x) {
  const auto map = coordinate_map(basis.model, a, x);
  const auto q = detail::jacobi_q_sequence(basis.mu, basis.nu, n + 1, map.y).back();
  const double ym = map.y - 1.0;
  const double yp = map.y + 1.0;
  const double al = basis.alpha;
  const double be = basis.beta;
  const double u = std::pow(ym, al) * std::pow(yp, -be);
  const double lu = al / ym - be / yp;                       // u'/u
  const double l2u = al * (al - 1.0) / (ym * ym) - 2.0 * al * be / (ym * yp) +
                     be * (be + 1.0) / (yp * yp);            // u''/u
  const double g = u * q.value;
  const double g1 = u * (lu * q.value + q.d1);
  const double g2 = u * (l2u * q.value + 2.0 * lu * q.d1 + q.d2);
  return {g, g1 * map.dy, g2 * map.dy * map.dy + g1 * map.d2y};
}

/// One element of the wave-operator matrix <phi_m | D | phi_n> with
/// D = -1/2 d^2/dx^2 + V - E, evaluated by adaptive quadrature over x, next
/// to the closed-form tridiagonal prediction W-orthogonality implies.
struct OperatorElement {
  double quadrature = 0.0;
  double predicted = 0.0;
  double error_estimate = 0.0;
};

inline OperatorElement tridiagonality_check(const PotentialSpec& p, double energy, int n, int m) {
  const TraBasis basis = basis_for(p);
  if (n < 0 || m < 0 || n > basis.nmax || m > basis.nmax)
    throw DomainError("tridiagonality_check: indices outside 0..N");
  const auto integrand = [&](double x) {
    if (x <= 0.0)
      return 0.0;
    const auto fn = basis_function(basis, p.a, n, x);
    const auto fm = basis_function(basis, p.a, m, x);
    const double d_phi = -0.5 * fn.d2 + (eval_potential(p, x) - energy) * fn.value;
    return fm.value * d_phi;
  };
  // <phi_m|W|phi_k> = -E * jac * norm_k * delta_mk.
  const double jac = p.model == Model::I ? 0.5 * p.a : p.a / (2.0 * std::numbers::sqrt2);
  const auto rc = recursion_coeffs(basis, p.a * p.a * energy, p.C);
  const auto jp = basis.jacobi();
  OperatorElement out;
  const double scale = -energy * jac * jacobi_q_norm(m, jp);
  if (m == n)
    out.predicted = scale * rc.d[static_cast<std::size_t>(n)];
  else if (m == n - 1)
    out.predicted = scale * rc.c[static_cast<std::size_t>(n - 1)];
  else if (m == n + 1)
    out.predicted = scale * rc.b[static_cast<std::size_t>(n)];

  const double magnitude =
      std::abs(energy) * jac * std::sqrt(jacobi_q_norm(n, jp) * jacobi_q_norm(m, jp));
  const double abs_tol = 1e-11 * magnitude;
  const double split[] = {0.0, 0.5 * p.a, p.a, 4.0 * p.a};
  for (int i = 0; i + 1 < 4; ++i) {
    const auto r = integrate(integrand, split[i], split[i + 1], abs_tol, 1e-10, 15);
    out.quadrature += r.value;
    out.error_estimate += r.error;
  }
  // The tail falls off only as a power of x (slowest, x^-2.35, at n = m = N
  // for the table parameters); x = 4a e^t turns that into exponential decay
  // in t, and t <= 30 keeps the Jacobi factors inside the double range.
  const double x4 = 4.0 * p.a;
  const auto tail = [&](double t) {
    const double x = x4 * std::exp(t);
    return integrand(x) * x;
  };
  const auto r = integrate(tail, 0.0, 30.0, abs_tol, 1e-10, 15);
  out.quadrature += r.value;
  out.error_estimate += r.error;
  return out;
}

} // namespace tra
