#pragma once

// Symmetric eigensolvers: implicit QL for tridiagonal matrices, a dense
// symmetric backend (Eigen), and the generalized problem H v = E W v with
// W symmetric positive definite.

#include "tra/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace tra {

/// Dense symmetric matrix. Writes go through `set`, which mirrors the entry,
/// so the stored matrix is exactly symmetric.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t order)
      : m_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(order),
                                 static_cast<Eigen::Index>(order))) {}

  /// Builds from the lower triangle of `dense`; the upper triangle is ignored.
  static SymMatrix from_lower(const Eigen::MatrixXd& dense) {
    if (dense.rows() != dense.cols())
      throw DomainError("SymMatrix::from_lower: matrix is not square");
    SymMatrix s;
    s.m_ = dense.selfadjointView<Eigen::Lower>();
    return s;
  }

  [[nodiscard]] std::size_t order() const noexcept {
    return static_cast<std::size_t>(m_.rows());
  }

  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  void set(std::size_t i, std::size_t j, double value) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto c = static_cast<Eigen::Index>(j);
    m_(r, c) = value;
    m_(c, r) = value;
  }

  void add(std::size_t i, std::size_t j, double value) {
    set(i, j, (*this)(i, j) + value);
  }

  [[nodiscard]] const Eigen::MatrixXd& dense() const noexcept { return m_; }

private:
  Eigen::MatrixXd m_;
};

/// Eigenvalues in ascending order; `vectors` holds the matching eigenvectors
/// as columns, or is empty when they were not requested.
struct EigenPairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors;

  [[nodiscard]] bool has_vectors() const noexcept { return vectors.size() > 0; }
};

enum class Vectors { Compute, Skip };

namespace detail {

/// Implicit QL with Wilkinson shifts on the tridiagonal (d, e), e[i] coupling
/// rows i and i+1. On exit d holds the eigenvalues (unsorted). Rotations are
/// accumulated into the leading `z.rows()` rows of the eigenvector matrix, so
/// passing a 1 x n matrix seeded with e_0^T tracks first components only.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double> e,
                           Eigen::MatrixXd* z) {
  const std::size_t n = d.size();
  if (n == 0)
    return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd)
          break;
      }
      if (m == l)
        break;
      if (++sweeps > max_sweeps)
        throw NumericalError("tridiagonal QL: no convergence");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        const std::size_t i = ii;
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) {
          for (Eigen::Index k = 0; k < z->rows(); ++k) {
            const auto ci = static_cast<Eigen::Index>(i);
            f = (*z)(k, ci + 1);
            (*z)(k, ci + 1) = s * (*z)(k, ci) + c * f;
            (*z)(k, ci) = c * (*z)(k, ci) - s * f;
          }
        }
      }
      if (underflow)
        continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

inline std::vector<std::size_t> ascending_order(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

inline EigenPairs sorted_pairs(const std::vector<double>& values,
                               const Eigen::MatrixXd* vectors) {
  const auto idx = ascending_order(values);
  EigenPairs out;
  out.values.reserve(values.size());
  for (auto i : idx)
    out.values.push_back(values[i]);
  if (vectors != nullptr) {
    out.vectors.resize(vectors->rows(), vectors->cols());
    for (std::size_t j = 0; j < idx.size(); ++j)
      out.vectors.col(static_cast<Eigen::Index>(j)) =
          vectors->col(static_cast<Eigen::Index>(idx[j]));
  }
  return out;
}

inline void check_tridiagonal(std::span<const double> diag,
                              std::span<const double> offdiag) {
  if (diag.empty())
    throw DomainError("tridiagonal eigensolver: empty matrix");
  if (offdiag.size() + 1 != diag.size())
    throw DomainError("tridiagonal eigensolver: offdiag must have length n-1");
}

} // namespace detail

/// Eigen-decomposition of the symmetric tridiagonal matrix with the given
/// diagonal and first off-diagonal.
inline EigenPairs sym_tridiag_eigen(std::span<const double> diag,
                                    std::span<const double> offdiag,
                                    Vectors want = Vectors::Compute) {
  detail::check_tridiagonal(diag, offdiag);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(offdiag.begin(), offdiag.end());
  if (want == Vectors::Skip) {
    detail::tridiagonal_ql(d, std::move(e), nullptr);
    return detail::sorted_pairs(d, nullptr);
  }
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(n, n);
  detail::tridiagonal_ql(d, std::move(e), &z);
  return detail::sorted_pairs(d, &z);
}

/// Eigenvalues plus the first component of each normalized eigenvector, in
/// O(n^2). `vectors` is 1 x n.
inline EigenPairs sym_tridiag_first_components(std::span<const double> diag,
                                               std::span<const double> offdiag) {
  detail::check_tridiagonal(diag, offdiag);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(offdiag.begin(), offdiag.end());
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(d.size()));
  z(0, 0) = 1.0;
  detail::tridiagonal_ql(d, std::move(e), &z);
  return detail::sorted_pairs(d, &z);
}

/// Standard dense symmetric eigenproblem.
inline EigenPairs sym_eigen(const SymMatrix& a, Vectors want = Vectors::Compute) {
  if (a.order() == 0)
    throw DomainError("sym_eigen: empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a.dense(), want == Vectors::Compute ? Eigen::ComputeEigenvectors
                                          : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("sym_eigen: eigensolver did not converge");
  EigenPairs out;
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
  if (want == Vectors::Compute)
    out.vectors = solver.eigenvectors();
  return out;
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
inline Eigen::MatrixXd cholesky_lower(const SymMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.order());
  const Eigen::MatrixXd& m = a.dense();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0))
      throw NotPositiveDefinite(static_cast<std::size_t>(j));
    const double root = std::sqrt(pivot);
    l(j, j) = root;
    if (j + 1 < n) {
      l.col(j).tail(n - j - 1) =
          (m.col(j).tail(n - j - 1) -
           l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) /
          root;
    }
  }
  return l;
}

/// Generalized problem H v = E W v via W = L L^T and the standard problem
/// L^{-1} H L^{-T}. Returned vectors are W-orthonormal.
inline EigenPairs generalized_sym_eigen(const SymMatrix& h, const SymMatrix& omega,
                                        Vectors want = Vectors::Compute) {
  if (h.order() != omega.order())
    throw DomainError("generalized_sym_eigen: order mismatch");
  if (h.order() == 0)
    throw DomainError("generalized_sym_eigen: empty matrix");
  const Eigen::MatrixXd l = cholesky_lower(omega);
  const auto tri = l.triangularView<Eigen::Lower>();
  // reduced = L^{-1} H L^{-T}
  Eigen::MatrixXd tmp = tri.solve(h.dense());
  Eigen::MatrixXd reduced = tri.solve(tmp.transpose());
  tmp.resize(0, 0);
  EigenPairs pairs = sym_eigen(SymMatrix::from_lower(reduced), want);
  if (pairs.has_vectors())
    pairs.vectors = tri.transpose().solve(pairs.vectors);
  return pairs;
}

/// Generalized problem with overlap W = I + s s^T. Uses the closed form
/// W^{-1/2} = I + k s s^T, k = (1/sqrt(1 + |s|^2) - 1)/|s|^2, so the reduction
/// costs O(n^2) and needs one extra n x n buffer.
inline EigenPairs generalized_sym_eigen_rank_one(const SymMatrix& h,
                                                 std::span<const double> s,
                                                 Vectors want = Vectors::Compute) {
  const auto n = static_cast<Eigen::Index>(h.order());
  if (static_cast<Eigen::Index>(s.size()) != n)
    throw DomainError("generalized_sym_eigen_rank_one: order mismatch");
  if (n == 0)
    throw DomainError("generalized_sym_eigen_rank_one: empty matrix");
  const Eigen::Map<const Eigen::VectorXd> sv(s.data(), n);
  const double s2 = sv.squaredNorm();
  const double k = s2 > 0.0 ? (1.0 / std::sqrt(1.0 + s2) - 1.0) / s2 : 0.0;
  const Eigen::VectorXd hs = h.dense() * sv;
  const double shs = sv.dot(hs);
  Eigen::MatrixXd reduced = h.dense();
  reduced.noalias() += k * (sv * hs.transpose() + hs * sv.transpose());
  reduced.noalias() += (k * k * shs) * (sv * sv.transpose());
  SymMatrix sym = SymMatrix::from_lower(reduced);
  reduced.resize(0, 0);
  EigenPairs pairs = sym_eigen(sym, want);
  if (pairs.has_vectors()) {
    const Eigen::RowVectorXd proj = sv.transpose() * pairs.vectors;
    pairs.vectors.noalias() += k * sv * proj;
  }
  return pairs;
}

} // namespace tra
