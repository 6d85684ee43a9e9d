#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tra {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to deliver its contract (no convergence,
/// lost definiteness, quadrature error above target).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization broke down; `minor()` is the zero-based order of
/// the first leading minor that is not positive.
class NotPositiveDefinite : public NumericalError {
public:
  explicit NotPositiveDefinite(std::size_t minor)
      : NumericalError("matrix is not positive definite: leading minor " +
                       std::to_string(minor + 1) + " is not positive"),
        minor_(minor) {}

  [[nodiscard]] std::size_t minor() const noexcept { return minor_; }

private:
  std::size_t minor_;
};

} // namespace tra
