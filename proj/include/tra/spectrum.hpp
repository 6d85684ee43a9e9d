#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace tra {

enum class Method { Hmd, Lmm };

inline std::string_view to_string(Method m) { return m == Method::Hmd ? "hmd" : "lmm"; }

/// Bound-state energies (E < 0, ascending) and where they came from.
struct SpectrumResult {
  Method method = Method::Hmd;
  int basis_size = 0;
  /// lambda (HMD, inverse length) or h (LMM, length).
  double scale = 0.0;
  int quad_points = 0;
  std::vector<double> energies;
  /// Eigenvectors of the bound states as columns; empty when not requested.
  Eigen::MatrixXd vectors;
  /// Eigenvalues >= 0 (discretized continuum).
  int continuum_count = 0;

  [[nodiscard]] std::size_t bound_count() const noexcept { return energies.size(); }
};

namespace detail {

template <class Pairs>
SpectrumResult split_bound_states(const Pairs& pairs, SpectrumResult out) {
  std::vector<Eigen::Index> bound;
  for (std::size_t i = 0; i < pairs.values.size(); ++i) {
    if (pairs.values[i] < 0.0) {
      out.energies.push_back(pairs.values[i]);
      bound.push_back(static_cast<Eigen::Index>(i));
    } else {
      ++out.continuum_count;
    }
  }
  if (pairs.has_vectors()) {
    out.vectors.resize(pairs.vectors.rows(), static_cast<Eigen::Index>(bound.size()));
    for (std::size_t j = 0; j < bound.size(); ++j)
      out.vectors.col(static_cast<Eigen::Index>(j)) = pairs.vectors.col(bound[j]);
  }
  return out;
}

} // namespace detail

} // namespace tra
