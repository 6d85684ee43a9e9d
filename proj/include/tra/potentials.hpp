#pragma once

// The two four-parameter potentials, their critical-point cubics, and the
// spectral-phase classification of a parameter point.

#include "tra/error.hpp"
#include "tra/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace tra {

enum class Model { I, II };

inline std::string_view to_string(Model m) { return m == Model::I ? "I" : "II"; }

/// Model plus parameters. `a` is a length (atomic units); A, B, C are
/// dimensionless couplings.
struct PotentialSpec {
  Model model = Model::I;
  double a = 1.0;
  double A = 1.0;
  double B = 1.0;
  double C = 1.0;

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a))
      throw DomainError("PotentialSpec: length scale a must be positive");
    if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(C))
      throw DomainError("PotentialSpec: couplings must be finite");
  }
};

/// V(x) from the compact (bracketed) form.
inline double eval_potential(const PotentialSpec& p, double x) {
  p.validate();
  if (!(x > 0.0))
    throw DomainError("eval_potential: x must be positive");
  const double a2 = p.a * p.a;
  if (p.model == Model::I) {
    const double q = x * x + 2.0 * a2;
    return 2.0 / q * (a2 * p.A / (x * x) - a2 * p.B / q + p.C);
  }
  const double w = x * (x + 2.0 * p.a);
  const double r = x + p.a;
  return 1.0 / w * (a2 * p.A / w - a2 * p.B / (r * r) + p.C);
}

/// V(x) from the partial-fraction form. Agrees with eval_potential up to
/// rounding; kept separate so each form checks the other.
inline double eval_potential_partial_fractions(const PotentialSpec& p, double x) {
  p.validate();
  if (!(x > 0.0))
    throw DomainError("eval_potential_partial_fractions: x must be positive");
  const double a2 = p.a * p.a;
  if (p.model == Model::I) {
    const double q = x * x + 2.0 * a2;
    return p.A / (x * x) + (2.0 * p.C - p.A) / q - 2.0 * a2 * p.B / (q * q);
  }
  const double x2a = x + 2.0 * p.a;
  const double xa = x + p.a;
  return 0.25 * p.A / (x * x) + (2.0 * p.C - 2.0 * p.B - p.A) / (2.0 * x * x2a) +
         0.25 * p.A / (x2a * x2a) + p.B / (xa * xa);
}

/// dV/dx, differentiated analytically from the partial-fraction form.
inline double potential_derivative(const PotentialSpec& p, double x) {
  p.validate();
  if (!(x > 0.0))
    throw DomainError("potential_derivative: x must be positive");
  const double a2 = p.a * p.a;
  if (p.model == Model::I) {
    const double q = x * x + 2.0 * a2;
    return -2.0 * p.A / (x * x * x) - 2.0 * x * (2.0 * p.C - p.A) / (q * q) +
           8.0 * a2 * p.B * x / (q * q * q);
  }
  const double x2a = x + 2.0 * p.a;
  const double xa = x + p.a;
  const double w = x * x2a;
  return -0.5 * p.A / (x * x * x) -
         (2.0 * p.C - 2.0 * p.B - p.A) * (2.0 * xa) / (2.0 * w * w) -
         0.5 * p.A / (x2a * x2a * x2a) - 2.0 * p.B / (xa * xa * xa);
}

/// Critical-point cubic c3 u^3 + c2 u^2 + c1 u + c0 in u = s = (x/a)^2
/// (Model I) or u = t = (x/a + 1)^2 - 1 (Model II).
struct CubicCoefficients {
  double c3 = 0.0;
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  [[nodiscard]] std::array<double, 4> descending() const { return {c3, c2, c1, c0}; }

  [[nodiscard]] double operator()(double u) const {
    return ((c3 * u + c2) * u + c1) * u + c0;
  }
};

inline CubicCoefficients critical_cubic(const PotentialSpec& p) {
  if (p.model == Model::I)
    return {p.C, 2.0 * (p.C - p.B + p.A), 6.0 * p.A, 4.0 * p.A};
  return {p.C, 2.0 * (p.C - p.B + p.A), p.C - p.B + 4.0 * p.A, 2.0 * p.A};
}

/// Sign changes in the coefficient sequence, zeros skipped.
inline int sign_changes(const CubicCoefficients& c) {
  int changes = 0;
  int last = 0;
  for (double v : c.descending()) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0)
      continue;
    if (last != 0 && s != last)
      ++changes;
    last = s;
  }
  return changes;
}

/// Positive real roots, ascending. Roots are eigenvalues of the companion
/// matrix of the (degree-reduced) polynomial, then Newton-polished; a root
/// counts as real when |Im| <= 1e-10 |root|.
inline std::vector<double> positive_real_roots(const CubicCoefficients& cubic) {
  std::vector<double> coeffs;  // descending, leading nonzero
  for (double v : cubic.descending()) {
    if (coeffs.empty() && v == 0.0)
      continue;
    coeffs.push_back(v);
  }
  std::vector<double> out;
  if (coeffs.size() < 2)
    return out;
  const auto degree = static_cast<Eigen::Index>(coeffs.size() - 1);
  std::vector<double> candidates;
  if (degree == 1) {
    candidates.push_back(-coeffs[1] / coeffs[0]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (Eigen::Index j = 0; j < degree; ++j)
      companion(0, j) = -coeffs[static_cast<std::size_t>(j + 1)] / coeffs[0];
    for (Eigen::Index i = 1; i < degree; ++i)
      companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    if (es.info() != Eigen::Success)
      throw NumericalError("positive_real_roots: companion eigensolve failed");
    for (Eigen::Index i = 0; i < degree; ++i) {
      const auto z = es.eigenvalues()(i);
      if (std::abs(z.imag()) <= 1e-10 * std::abs(z))
        candidates.push_back(z.real());
    }
  }
  const auto poly = [&](double u) {
    double v = 0.0;
    for (double c : coeffs)
      v = v * u + c;
    return v;
  };
  const auto dpoly = [&](double u) {
    double v = 0.0;
    const auto n = coeffs.size() - 1;
    for (std::size_t i = 0; i < n; ++i)
      v = v * u + coeffs[i] * static_cast<double>(n - i);
    return v;
  };
  for (double r : candidates) {
    for (int it = 0; it < 3; ++it) {
      const double dp = dpoly(r);
      if (dp == 0.0)
        break;
      const double step = poly(r) / dp;
      if (!std::isfinite(step) || std::abs(step) > 1e-6 * std::max(1.0, std::abs(r)))
        break;
      r -= step;
    }
    if (r > 0.0)
      out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Maps a root of the critical cubic back to the position x0.
inline double critical_point_from_root(const PotentialSpec& p, double root) {
  if (p.model == Model::I)
    return p.a * std::sqrt(root);
  return p.a * (std::sqrt(root + 1.0) - 1.0);
}

enum class SpectrumPhase { Scattering, BoundOnly, BoundAndResonance };

inline std::string_view to_string(SpectrumPhase s) {
  switch (s) {
  case SpectrumPhase::Scattering:
    return "S";
  case SpectrumPhase::BoundOnly:
    return "B";
  case SpectrumPhase::BoundAndResonance:
    return "B&R";
  }
  return "?";
}

struct SpdLabel {
  SpectrumPhase label = SpectrumPhase::Scattering;
  int positive_root_count = 0;
  bool well_depth_negative = false;
  /// Three positive critical points; classified by the deepest minimum.
  bool exotic = false;
  /// Deepest local minimum (NaN when V has no interior minimum).
  double x_min = std::numeric_limits<double>::quiet_NaN();
  double v_min = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline bool is_local_minimum(const PotentialSpec& p, double x0) {
  const double h = 1e-6 * x0;
  return potential_derivative(p, x0 - h) < 0.0 && potential_derivative(p, x0 + h) > 0.0;
}

} // namespace detail

inline SpdLabel classify_spectrum(const PotentialSpec& p) {
  p.validate();
  SpdLabel out;
  const auto roots = positive_real_roots(critical_cubic(p));
  out.positive_root_count = static_cast<int>(roots.size());
  out.exotic = roots.size() == 3;
  for (double r : roots) {
    const double x0 = critical_point_from_root(p, r);
    if (!(x0 > 0.0) || !detail::is_local_minimum(p, x0))
      continue;
    const double v = eval_potential(p, x0);
    if (std::isnan(out.v_min) || v < out.v_min) {
      out.v_min = v;
      out.x_min = x0;
    }
  }
  out.well_depth_negative = !std::isnan(out.v_min) && out.v_min < 0.0;
  if (!out.well_depth_negative)
    return out;
  const bool bound_only = p.C < 0.0 && (roots.size() == 1 || out.exotic);
  const bool bound_res = p.C > 0.0 && (roots.size() == 2 || out.exotic);
  if (bound_only)
    out.label = SpectrumPhase::BoundOnly;
  else if (bound_res)
    out.label = SpectrumPhase::BoundAndResonance;
  return out;
}

/// Integral of x V^-(x) over the region where V < 0, with V^- = -V theta(-V).
struct BoundStateBound {
  bool finite = true;
  double integral = 0.0;
  double x_minus = std::numeric_limits<double>::quiet_NaN();
  double x_plus = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// Bisection for a sign change of V on [lo, hi], tolerance 1e-12 in x.
inline double bisect_potential_zero(const PotentialSpec& p, double lo, double hi) {
  double vlo = eval_potential(p, lo);
  for (int it = 0; it < 400 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double vm = eval_potential(p, mid);
    if ((vm < 0.0) == (vlo < 0.0)) {
      lo = mid;
      vlo = vm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace detail

inline BoundStateBound bound_state_count_bound(const PotentialSpec& p) {
  p.validate();
  BoundStateBound out;
  if (p.C <= 0.0) {
    out.finite = false;
    out.integral = std::numeric_limits<double>::infinity();
    return out;
  }
  const SpdLabel spd = classify_spectrum(p);
  if (!spd.well_depth_negative)
    return out;
  const double xm = spd.x_min;

  double lo = 0.5 * xm;
  int steps = 0;
  while (eval_potential(p, lo) < 0.0) {
    lo *= 0.5;
    if (++steps > 200) {
      out.finite = false;
      out.integral = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  double hi = 2.0 * xm;
  steps = 0;
  while (eval_potential(p, hi) < 0.0) {
    hi *= 2.0;
    if (++steps > 200) {
      out.finite = false;
      out.integral = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  out.x_minus = detail::bisect_potential_zero(p, lo, xm);
  out.x_plus = detail::bisect_potential_zero(p, xm, hi);
  const auto integrand = [&](double x) {
    const double v = eval_potential(p, x);
    return v < 0.0 ? -x * v : 0.0;
  };
  out.integral = integrate(integrand, out.x_minus, xm, 1e-9, 1e-12).value +
                 integrate(integrand, xm, out.x_plus, 1e-9, 1e-12).value;
  return out;
}

} // namespace tra
