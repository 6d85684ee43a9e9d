#include "tra/fixtures.hpp"
#include "tra/solver_hmd.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tra;

namespace {

HmdConfig config(int m, double lambda = 10.0) {
  HmdConfig c;
  c.basis_size = m;
  c.lambda = lambda;
  c.sigma = 3.0;
  c.quad_points = 4 * m;
  return c;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::abs(b[k]));
  return worst;
}

} // namespace

TEST(HmdMatrices, OverlapSmallOrders) {
  const auto w1 = build_overlap(config(1));
  EXPECT_DOUBLE_EQ(w1(0, 0), 4.0);
  const auto w2 = build_overlap(config(2));
  EXPECT_DOUBLE_EQ(w2(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(w2(0, 1), -2.0);
  EXPECT_DOUBLE_EQ(w2(1, 1), 6.0);
}

TEST(HmdMatrices, KineticSmallOrder) {
  const auto t = build_kinetic(config(2));
  EXPECT_DOUBLE_EQ(t(0, 0), 50.0);
  EXPECT_DOUBLE_EQ(t(0, 1), 25.0);
  EXPECT_DOUBLE_EQ(t(1, 1), 75.0);
}

TEST(HmdMatrices, SigmaFromCoupling) {
  EXPECT_DOUBLE_EQ(hmd_sigma(table1().spec), 3.0);
  EXPECT_DOUBLE_EQ(hmd_sigma(table2().spec), std::sqrt(3.0));
  EXPECT_THROW(hmd_sigma({Model::I, 1.0, -1.0, 1.0, 1.0}), DomainError);
}

TEST(HmdConfigValidation, Errors) {
  auto c = config(10);
  c.quad_points = 9;
  EXPECT_THROW(c.validate(), DomainError);
  EXPECT_THROW(make_hmd_config(table1().spec, 0, 10.0), DomainError);
  EXPECT_THROW(make_hmd_config(table1().spec, 10, -1.0), DomainError);
  EXPECT_EQ(make_hmd_config(table1().spec, 25, 10.0).quad_points, 100);
}

TEST(HmdSpectrum, ReproducesTables) {
  for (const auto* t : {&table1(), &table2()}) {
    const auto c = make_hmd_config(t->spec, t->hmd_basis, t->hmd_lambda);
    const auto r = hmd_spectrum(t->spec, c, Vectors::Skip);
    ASSERT_EQ(r.bound_count(), 5u) << t->name;
    for (std::size_t k = 0; k < 5; ++k)
      EXPECT_TRUE(TableFixture::agrees(r.energies[k], t->hmd[k], t->rel_tol[k]))
          << t->name << " k=" << k << " got " << r.energies[k];
    EXPECT_EQ(r.continuum_count, t->hmd_basis - 5);
  }
}

TEST(HmdSpectrum, ConvergedInBasisSize) {
  const auto& t = table1();
  const auto a = hmd_spectrum(t.spec, make_hmd_config(t.spec, 100, 10.0), Vectors::Skip);
  const auto b = hmd_spectrum(t.spec, make_hmd_config(t.spec, 150, 10.0), Vectors::Skip);
  EXPECT_LT(max_rel_diff(a.energies, b.energies, 5), 1e-9);
}

TEST(HmdSpectrum, PlateauInLambda) {
  const auto& t = table1();
  const auto ref = hmd_spectrum(t.spec, make_hmd_config(t.spec, 100, 10.0), Vectors::Skip);
  for (double lambda : {8.0, 12.0}) {
    const auto r = hmd_spectrum(t.spec, make_hmd_config(t.spec, 100, lambda), Vectors::Skip);
    EXPECT_LT(max_rel_diff(r.energies, ref.energies, 5), 1e-8) << "lambda " << lambda;
  }
}

TEST(HmdSpectrum, QuadratureOrderConverged) {
  const auto& t = table1();
  const auto c1 = make_hmd_config(t.spec, 60, 10.0, 240);
  const auto c2 = make_hmd_config(t.spec, 60, 10.0, 480);
  const auto h1 = build_hamiltonian(t.spec, c1);
  const auto h2 = build_hamiltonian(t.spec, c2);
  const double scale = h2.dense().cwiseAbs().maxCoeff();
  EXPECT_LT((h1.dense() - h2.dense()).cwiseAbs().maxCoeff(), 1e-12 * scale);
}

TEST(HmdSpectrum, OverlapStaysPositiveDefinite) {
  for (int m : {1, 10, 100, 200})
    EXPECT_NO_THROW(cholesky_lower(build_overlap(config(m))));
}

TEST(HmdWavefunction, NormalizedAndOrthogonal) {
  const auto& t = table1();
  const auto c = make_hmd_config(t.spec, t.hmd_basis, t.hmd_lambda);
  const auto r = hmd_spectrum(t.spec, c);
  ASSERT_EQ(r.vectors.cols(), 5);
  std::vector<double> x;
  const int n = 8000;
  const double dx = 20.0 / n;
  for (int i = 0; i <= n; ++i)
    x.push_back(i * dx);
  std::vector<std::vector<double>> psi;
  for (Eigen::Index k = 0; k < 5; ++k)
    psi.push_back(hmd_wavefunction(c, r.vectors.col(k), x));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(psi[i][0], 0.0);
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int q = 0; q <= n; ++q)
        s += (q == 0 || q == n ? 0.5 : 1.0) * psi[i][q] * psi[j][q];
      s *= dx;
      EXPECT_NEAR(s, i == j ? 1.0 : 0.0, 1e-6) << i << "," << j;
    }
  }
  EXPECT_THROW(hmd_wavefunction(c, Eigen::VectorXd::Zero(3), x), DomainError);
}
