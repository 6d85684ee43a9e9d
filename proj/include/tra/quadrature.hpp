#pragma once

// Adaptive Gauss-Kronrod integration (Boost.Math) with an explicit error
// contract: a result whose error estimate misses the target throws.

#include "tra/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace tra {

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
};

/// Integrates f over [a, b]; b may be +infinity. Throws NumericalError when
/// the estimated error exceeds max(abs_tol, rel_tol * |value|).
template <class F>
IntegrationResult integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                            double rel_tol = 1e-10, unsigned max_depth = 15) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  double l1 = 0.0;
  const double value = gauss_kronrod<double, 61>::integrate(
      f, a, b, max_depth, rel_tol, &err, &l1);
  if (!std::isfinite(value))
    throw NumericalError("integrate: non-finite result");
  const double target = std::max(abs_tol, rel_tol * std::abs(value));
  if (err > target)
    throw NumericalError("integrate: error estimate " + std::to_string(err) +
                         " above target " + std::to_string(target) + " on [" +
                         std::to_string(a) + ", " + std::to_string(b) + "]");
  return {value, err};
}

} // namespace tra
