#pragma once

// Jacobi polynomials on the semi-infinite line y >= 1, Laguerre polynomials,
// and Gauss-Laguerre quadrature.

#include "tra/error.hpp"
#include "tra/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace tra {

/// log|Gamma(x)| with the sign of Gamma(x); valid at negative non-integers.
struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
};

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::nearbyint(x) == x;
}

inline SignedLog log_gamma_signed(double x) {
  if (is_nonpositive_integer(x))
    throw DomainError("log_gamma_signed: pole of Gamma at " + std::to_string(x));
  if (x > 0.0)
    return {std::lgamma(x), 1};
  // Gamma(x) Gamma(1 - x) = pi / sin(pi x), with Gamma(1 - x) > 0.
  const double s = std::sin(std::numbers::pi * x);
  return {std::log(std::numbers::pi / std::abs(s)) - std::lgamma(1.0 - x),
          s > 0.0 ? 1 : -1};
}

/// Rising factorial (x)_n by running product.
inline double pochhammer(double x, int n) {
  double p = 1.0;
  for (int k = 0; k < n; ++k)
    p *= x + k;
  return p;
}

/// Parameters of the finite family Q_n^{(mu,nu)}, n = 0..nmax, which requires
/// mu > -1 and mu + nu < -2 nmax - 1.
class JacobiParams {
public:
  JacobiParams(double mu, double nu, int nmax) : mu_(mu), nu_(nu), nmax_(nmax) {
    if (nmax < 0)
      throw DomainError("JacobiParams: nmax must be non-negative");
    if (!(mu > -1.0))
      throw DomainError("JacobiParams: mu must exceed -1");
    if (!(mu + nu < -2.0 * nmax - 1.0))
      throw DomainError("JacobiParams: mu + nu must be below -2 nmax - 1");
  }

  [[nodiscard]] double mu() const noexcept { return mu_; }
  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] int nmax() const noexcept { return nmax_; }

private:
  double mu_;
  double nu_;
  int nmax_;
};

/// Coefficients of y Q_n = diag Q_n + lower Q_{n-1} + upper Q_{n+1}.
struct JacobiRecursion {
  double mu;
  double nu;

  [[nodiscard]] double diag(int n) const {
    const double s = mu + nu;
    if (n == 0)
      return (nu - mu) / (s + 2.0);
    return (nu * nu - mu * mu) / ((2.0 * n + s) * (2.0 * n + s + 2.0));
  }
  [[nodiscard]] double lower(int n) const {
    const double s = mu + nu;
    return 2.0 * (n + mu) * (n + nu) / ((2.0 * n + s) * (2.0 * n + s + 1.0));
  }
  [[nodiscard]] double upper(int n) const {
    const double s = mu + nu;
    if (n == 0)
      return 2.0 / (s + 2.0);
    return 2.0 * (n + 1.0) * (n + s + 1.0) / ((2.0 * n + s + 1.0) * (2.0 * n + s + 2.0));
  }
};

/// Q_n, dQ_n/dy and d2Q_n/dy2 for one n.
struct JacobiValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

namespace detail {

/// Q_0..Q_{count-1} (with derivatives) by forward recursion, differentiated
/// term by term. No family-size check: the polynomials exist algebraically
/// past nmax, which the differential relation at n = nmax needs.
inline std::vector<JacobiValue> jacobi_q_sequence(double mu, double nu, int count,
                                                  double y) {
  std::vector<JacobiValue> q(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0)
    return q;
  q[0] = {1.0, 0.0, 0.0};
  if (count == 1)
    return q;
  const double s = mu + nu;
  q[1] = {(mu + 1.0) + 0.5 * (s + 2.0) * (y - 1.0), 0.5 * (s + 2.0), 0.0};
  const JacobiRecursion rec{mu, nu};
  for (int n = 1; n + 1 < count; ++n) {
    const double up = rec.upper(n);
    if (up == 0.0 || !std::isfinite(up))
      throw DomainError("jacobi_q: degenerate recursion at n = " + std::to_string(n));
    const double dn = rec.diag(n);
    const double ln = rec.lower(n);
    const auto& c = q[static_cast<std::size_t>(n)];
    const auto& p = q[static_cast<std::size_t>(n - 1)];
    auto& nx = q[static_cast<std::size_t>(n + 1)];
    nx.value = ((y - dn) * c.value - ln * p.value) / up;
    nx.d1 = ((y - dn) * c.d1 + c.value - ln * p.d1) / up;
    nx.d2 = ((y - dn) * c.d2 + 2.0 * c.d1 - ln * p.d2) / up;
  }
  return q;
}

inline void check_jacobi_args(int n, const JacobiParams& params, double y) {
  if (n < 0 || n > params.nmax())
    throw DomainError("jacobi_q: degree " + std::to_string(n) +
                      " outside the finite family 0.." + std::to_string(params.nmax()));
  if (!(y >= 1.0))
    throw DomainError("jacobi_q: y must be >= 1");
}

} // namespace detail

/// Q_n^{(mu,nu)}(y), normalized so Q_n(1) = Gamma(n+mu+1)/(n! Gamma(mu+1)).
inline double jacobi_q(int n, const JacobiParams& params, double y) {
  detail::check_jacobi_args(n, params, y);
  return detail::jacobi_q_sequence(params.mu(), params.nu(), n + 1, y).back().value;
}

/// Q_n with first and second derivatives.
inline JacobiValue jacobi_q_with_derivatives(int n, const JacobiParams& params, double y) {
  detail::check_jacobi_args(n, params, y);
  return detail::jacobi_q_sequence(params.mu(), params.nu(), n + 1, y).back();
}

/// All of Q_0..Q_nmax at y.
inline std::vector<double> jacobi_q_all(const JacobiParams& params, double y) {
  detail::check_jacobi_args(0, params, y);
  const auto seq = detail::jacobi_q_sequence(params.mu(), params.nu(), params.nmax() + 1, y);
  std::vector<double> out;
  out.reserve(seq.size());
  for (const auto& v : seq)
    out.push_back(v.value);
  return out;
}

/// Orthogonality norm: integral over y >= 1 of (y-1)^mu (y+1)^nu Q_n^2,
/// from the Gamma-function closed form with the (-1)^(n+1) Gamma(-n-mu-nu)
/// factor.
inline double jacobi_q_norm(int n, const JacobiParams& params) {
  if (n < 0 || n > params.nmax())
    throw DomainError("jacobi_q_norm: degree outside the finite family");
  const double mu = params.mu();
  const double nu = params.nu();
  const double s = mu + nu;
  const SignedLog g[] = {log_gamma_signed(n + mu + 1.0), log_gamma_signed(n + nu + 1.0),
                         log_gamma_signed(-n - s), log_gamma_signed(n + 1.0),
                         log_gamma_signed(-nu), log_gamma_signed(nu + 1.0)};
  const double denom = 2.0 * n + s + 1.0;
  const double log_abs = (s + 1.0) * std::numbers::ln2 - std::log(std::abs(denom)) +
                         g[0].log_abs + g[1].log_abs + g[2].log_abs - g[3].log_abs -
                         g[4].log_abs - g[5].log_abs;
  int sign = (n % 2 == 0 ? -1 : 1) * (denom > 0.0 ? 1 : -1);
  sign *= g[0].sign * g[1].sign * g[2].sign * g[3].sign * g[4].sign * g[5].sign;
  return sign * std::exp(log_abs);
}

/// The same norm written with sin(pi nu) / sin(pi (mu + nu + 1)).
inline double jacobi_q_norm_sine_form(int n, const JacobiParams& params) {
  if (n < 0 || n > params.nmax())
    throw DomainError("jacobi_q_norm_sine_form: degree outside the finite family");
  const double mu = params.mu();
  const double nu = params.nu();
  const double s = mu + nu;
  const SignedLog g[] = {log_gamma_signed(n + mu + 1.0), log_gamma_signed(n + nu + 1.0),
                         log_gamma_signed(n + 1.0), log_gamma_signed(n + s + 1.0)};
  const double ratio = std::sin(std::numbers::pi * nu) / std::sin(std::numbers::pi * (s + 1.0));
  const double denom = 2.0 * n + s + 1.0;
  const double mag = std::exp((s + 1.0) * std::numbers::ln2 + g[0].log_abs + g[1].log_abs -
                              g[2].log_abs - g[3].log_abs) /
                     denom;
  return mag * ratio * g[0].sign * g[1].sign * g[2].sign * g[3].sign;
}

/// Laguerre polynomial L_m^sigma(z) by forward recursion.
inline double laguerre(int m, double sigma, double z) {
  if (m < 0)
    throw DomainError("laguerre: degree must be non-negative");
  double prev = 1.0;
  if (m == 0)
    return prev;
  double cur = 1.0 + sigma - z;
  for (int k = 1; k < m; ++k) {
    const double next = ((2.0 * k + 1.0 + sigma - z) * cur - (k + sigma) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace detail {

/// L_m^sigma(z) and L_{m-1}^sigma(z) scaled by exp(-log_scale) so large m and
/// z do not overflow.
struct ScaledLaguerrePair {
  double lm = 0.0;
  double lm1 = 0.0;
  double log_scale = 0.0;
};

inline ScaledLaguerrePair laguerre_pair_scaled(int m, double sigma, double z) {
  ScaledLaguerrePair out;
  double prev = 1.0;
  double cur = 1.0 + sigma - z;
  if (m == 1) {
    out.lm = cur;
    out.lm1 = prev;
    return out;
  }
  for (int k = 1; k < m; ++k) {
    const double next = ((2.0 * k + 1.0 + sigma - z) * cur - (k + sigma) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    const double big = std::abs(cur);
    if (big > 1e150) {
      cur /= big;
      prev /= big;
      out.log_scale += std::log(big);
    }
  }
  out.lm = cur;
  out.lm1 = prev;
  return out;
}

inline void laguerre_jacobi_matrix(int m, double sigma, std::vector<double>& diag,
                                   std::vector<double>& off) {
  diag.resize(static_cast<std::size_t>(m));
  off.resize(static_cast<std::size_t>(m - 1));
  for (int i = 0; i < m; ++i)
    diag[static_cast<std::size_t>(i)] = 2.0 * i + sigma + 1.0;
  for (int i = 1; i < m; ++i)
    off[static_cast<std::size_t>(i - 1)] = std::sqrt(i * (i + sigma));
}

/// One Newton step on L_m^sigma at x, using x L_m' = m L_m - (m+sigma) L_{m-1}.
inline double newton_polish(int m, double sigma, double x) {
  const auto p = laguerre_pair_scaled(m, sigma, x);
  const double dl = m * p.lm - (m + sigma) * p.lm1;
  if (dl == 0.0)
    return x;
  const double step = x * p.lm / dl;
  return std::isfinite(step) ? x - step : x;
}

inline std::vector<double> laguerre_nodes(int m, double sigma) {
  std::vector<double> diag;
  std::vector<double> off;
  laguerre_jacobi_matrix(m, sigma, diag, off);
  auto nodes = sym_tridiag_eigen(diag, off, Vectors::Skip).values;
  for (double& x : nodes)
    x = newton_polish(m, sigma, x);
  return nodes;
}

} // namespace detail

/// The m zeros of L_m (sigma = 0), ascending.
inline std::vector<double> laguerre_zeros(int m) {
  if (m < 1)
    throw DomainError("laguerre_zeros: need at least one point");
  return detail::laguerre_nodes(m, 0.0);
}

/// Gauss rule for the weight z^sigma e^{-z} on [0, inf).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double sigma = 0.0;
  int m_points = 0;
};

/// Nodes from the Jacobi matrix (Golub-Welsch) with a Newton polish; weights
/// from w_i = Gamma(m+sigma+1) x_i / (m! (m+sigma)^2 L_{m-1}(x_i)^2),
/// evaluated in log space. Weights past the double range underflow to 0.
inline QuadratureRule gauss_laguerre(int m, double sigma) {
  if (m < 1)
    throw DomainError("gauss_laguerre: need at least one point");
  if (!(sigma > -1.0))
    throw DomainError("gauss_laguerre: sigma must exceed -1");
  QuadratureRule rule;
  rule.sigma = sigma;
  rule.m_points = m;
  rule.nodes = detail::laguerre_nodes(m, sigma);
  rule.weights.reserve(rule.nodes.size());
  const double log_front = std::lgamma(m + sigma + 1.0) - std::lgamma(m + 1.0) -
                           2.0 * std::log(m + sigma);
  for (double x : rule.nodes) {
    const auto p = detail::laguerre_pair_scaled(m, sigma, x);
    const double log_l = std::log(std::abs(p.lm1)) + p.log_scale;
    rule.weights.push_back(std::exp(log_front + std::log(x) - 2.0 * log_l));
  }
  return rule;
}

/// Gauss-Laguerre rule in eigenvector form: values(n, k) = C_n L_n^sigma(z_k)
/// sqrt(w_k) with C_n = sqrt(n!/Gamma(n+sigma+1)), for n < rows. Then
///   C_n C_m int z^sigma e^{-z} f L_n L_m dz ~ sum_k f(z_k) values(n,k) values(m,k)
/// without forming the (under/overflowing) weights and polynomial values.
struct LaguerreQuadratureMatrix {
  std::vector<double> nodes;
  Eigen::MatrixXd values;
};

inline LaguerreQuadratureMatrix laguerre_quadrature_matrix(int rows, int quad_points,
                                                           double sigma) {
  if (rows < 1 || quad_points < rows)
    throw DomainError("laguerre_quadrature_matrix: need quad_points >= rows >= 1");
  if (!(sigma > -1.0))
    throw DomainError("laguerre_quadrature_matrix: sigma must exceed -1");
  std::vector<double> diag;
  std::vector<double> off;
  detail::laguerre_jacobi_matrix(quad_points, sigma, diag, off);
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(rows, quad_points);
  std::vector<double> d = diag;
  detail::tridiagonal_ql(d, off, &z);
  const auto order = detail::ascending_order(d);
  LaguerreQuadratureMatrix out;
  out.nodes.reserve(order.size());
  out.values.resize(rows, quad_points);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    const auto dst = static_cast<Eigen::Index>(k);
    out.nodes.push_back(d[order[k]]);
    const double column_sign = z(0, src) >= 0.0 ? 1.0 : -1.0;
    for (Eigen::Index n = 0; n < rows; ++n)
      out.values(n, dst) = (n % 2 == 0 ? column_sign : -column_sign) * z(n, src);
  }
  return out;
}

} // namespace tra
