#include "tra/fixtures.hpp"
#include "tra/solver_hmd.hpp"
#include "tra/tra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace tra;

namespace {

const PotentialSpec table_i{Model::I, 1.0, 1.0, 100.0, 2.0};
const PotentialSpec table_ii{Model::II, 1.0, 1.0, 100.0, 2.0};

void expect_identity(const PotentialSpec& p, double epsilon) {
  const auto basis = basis_for(p);
  const auto f = expansion_coeffs(recursion_coeffs(basis, epsilon, p.C));
  const auto h = tra_poly_all(tra_poly_args(basis, epsilon, p.C), basis);
  ASSERT_EQ(f.size(), h.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double lhs = g_weight(static_cast<int>(n), basis) * f[n];
    EXPECT_NEAR(lhs, h[n], 1e-10 * std::max(1.0, std::abs(h[n]))) << "n = " << n;
  }
}

} // namespace

TEST(TraBasis, TableParameters) {
  const auto b1 = basis_for(table_i);
  EXPECT_DOUBLE_EQ(b1.mu, 1.5);
  EXPECT_DOUBLE_EQ(b1.nu, -std::sqrt(201.0));
  EXPECT_EQ(b1.nmax, 5);
  EXPECT_EQ(b1.capacity(), 6);
  const auto b2 = basis_for(table_ii);
  EXPECT_DOUBLE_EQ(b2.mu, std::sqrt(3.0));
  EXPECT_NEAR(b2.nu, -14.150972, 1e-6);
  EXPECT_EQ(b2.capacity(), 6);
  for (const auto& b : {b1, b2}) {
    EXPECT_GT(b.mu, -1.0);
    EXPECT_LT(b.mu + b.nu, -2.0 * b.nmax - 1.0);
  }
}

TEST(TraBasis, RejectsUnrepresentableCouplings) {
  EXPECT_THROW(basis_for({Model::I, 1.0, 1.0, 1.0, 2.0}), DomainError);
  EXPECT_THROW(basis_for({Model::I, 1.0, 0.0, 100.0, 2.0}), DomainError);
  EXPECT_THROW(basis_for({Model::II, 1.0, -1.0, 100.0, 2.0}), DomainError);
}

TEST(Recursion, CoefficientsAndFavard) {
  const auto basis = basis_for(table_i);
  const double eps = table1().hmd[0];
  const auto rc = recursion_coeffs(basis, eps, table_i.C);
  ASSERT_EQ(rc.d.size(), 6u);
  ASSERT_EQ(rc.b.size(), 5u);
  const double mu = 1.5, nu = -std::sqrt(201.0);
  EXPECT_NEAR(rc.b[0], 2.0 / (mu + nu + 2.0), 1e-15);
  EXPECT_NEAR(rc.b[0], -0.187311, 1e-6);
  const double c0 = 2.0 * (mu + 1.0) * (nu + 1.0) / ((mu + nu + 2.0) * (mu + nu + 3.0));
  EXPECT_NEAR(rc.c[0], c0, 1e-15);
  EXPECT_NEAR(rc.c[0], -0.637637, 1e-6);
  EXPECT_GT(rc.b[0] * rc.c[0], 0.0);
  EXPECT_TRUE(rc.favard_positive);
  EXPECT_THROW(recursion_coeffs(basis, 0.0, 2.0), DomainError);
  EXPECT_THROW(recursion_coeffs(basis, NAN, 2.0), DomainError);
}

TEST(Recursion, FirstExpansionCoefficient) {
  const auto basis = basis_for(table_ii);
  const auto rc = recursion_coeffs(basis, -3.7, table_ii.C);
  const auto f = expansion_coeffs(rc);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_NEAR(f[1], -rc.d[0] / rc.c[0], 1e-14 * std::abs(f[1]));
}

TEST(PolyArgs, Branches) {
  const auto b1 = basis_for(table_i);
  const double e1 = table1().hmd[0];
  const auto a1 = tra_poly_args(b1, e1, 2.0);
  EXPECT_EQ(a1.branch, TraBranch::Hyperbolic);
  EXPECT_NEAR(a1.cos_like, (e1 - 4.0) / e1, 1e-15);
  EXPECT_NEAR(a1.cos_like, 1.148550, 1e-6);
  EXPECT_NEAR(a1.z * a1.z, 1.0 / (2.0 * (2.0 - e1)), 1e-16);
  EXPECT_NEAR(std::cosh(a1.theta), a1.cos_like, 1e-13);

  const auto b2 = basis_for(table_ii);
  const auto hyp = tra_poly_args(b2, table2().hmd[4], 2.0);
  EXPECT_EQ(hyp.branch, TraBranch::Hyperbolic);
  const double e4 = table2().hmd[4];
  EXPECT_NEAR(hyp.cos_like, (e4 + 4.0) / -e4, 1e-14);
  EXPECT_NEAR(hyp.cos_like, 5.553283, 1e-6);
  const auto tri = tra_poly_args(b2, table2().hmd[0], 2.0);
  EXPECT_EQ(tri.branch, TraBranch::Trigonometric);
  EXPECT_NEAR(tri.cos_like, -0.992528, 1e-6);
  EXPECT_NEAR(std::cos(tri.theta), tri.cos_like, 1e-13);
  EXPECT_GE(tri.sin_like, 0.0);

  EXPECT_THROW(tra_poly_args(b2, -2.0, 2.0), DomainError);
  EXPECT_THROW(tra_poly_args(b2, 1.0, 2.0), DomainError);
  EXPECT_THROW(tra_poly_args(b1, -1.0, -2.0), DomainError);
}

TEST(Identity, HoldsOnBothBranches) {
  for (double e : table1().hmd)
    expect_identity(table_i, e);
  for (double e : table2().hmd)
    expect_identity(table_ii, e);
}

TEST(Identity, LowOrderTerms) {
  const auto basis = basis_for(table_i);
  const double eps = table1().hmd[1];
  const auto args = tra_poly_args(basis, eps, 2.0);
  const auto h = tra_poly_all(args, basis);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
  EXPECT_DOUBLE_EQ(g_weight(0, basis), 1.0);
  const double g1 = (basis.mu + 1.0) * (basis.nu + 1.0) / (basis.mu + basis.nu + 3.0);
  EXPECT_NEAR(g_weight(1, basis), g1, 1e-14 * g1);
  EXPECT_NEAR(g1, 3.404164, 1e-6);
  // H_1 from the n = 0 row of the recursion.
  const JacobiRecursion jr{basis.mu, basis.nu};
  const double half = 0.5 * (basis.mu + basis.nu + 1.0);
  const double h1 =
      ((half * half - 1.0 / 16.0) * args.z * args.sin_like - jr.diag(0) - args.cos_like) /
      jr.upper(0);
  EXPECT_NEAR(h[1], h1, 1e-13 * std::abs(h1));
  EXPECT_THROW(g_weight(6, basis), DomainError);
  EXPECT_THROW(tra_poly(-1, args, basis), DomainError);
}

TEST(Series, VanishesAtOriginAndDecays) {
  for (const auto* t : {&table1(), &table2()}) {
    for (double e : t->hmd) {
      const auto w = tra_series(t->spec, e);
      double peak = 0.0;
      for (int i = 1; i <= 200; ++i)
        peak = std::max(peak, std::abs(w(0.05 * i)));
      EXPECT_EQ(w(0.0), 0.0);
      EXPECT_LT(std::abs(w(1e-8)), 1e-6 * peak);
      EXPECT_TRUE(std::isfinite(w(50.0)));
    }
  }
  EXPECT_THROW(tra_series(table_i, 0.5), DomainError);
  EXPECT_THROW((void)tra_series(table_i, -1.0)(-1.0), DomainError);
}

TEST(Series, ModelIGroundStateMatchesHmd) {
  // The finite series is not exact for every state; the Model I ground state
  // is the one it reproduces closely.
  const auto& t = table1();
  const auto c = make_hmd_config(t.spec, t.hmd_basis, t.hmd_lambda);
  const auto r = hmd_spectrum(t.spec, c);
  std::vector<double> x;
  for (int i = 0; i <= 2000; ++i)
    x.push_back(0.01 * i);
  const auto tra = wavefunction(t.spec, t.hmd[0], x, 0).values;
  const auto hmd = hmd_wavefunction(c, r.vectors.col(0), x);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ab += tra[i] * hmd[i];
    aa += tra[i] * tra[i];
    bb += hmd[i] * hmd[i];
  }
  EXPECT_GT(std::abs(ab) / std::sqrt(aa * bb), 0.99);
}

TEST(Tridiagonality, BandMatchesPrediction) {
  for (const auto* t : {&table1(), &table2()}) {
    const double e = t->hmd[2];
    for (int n = 0; n <= 5; ++n) {
      for (int m = std::max(0, n - 1); m <= std::min(5, n + 1); ++m) {
        const auto el = tridiagonality_check(t->spec, e, n, m);
        EXPECT_NEAR(el.quadrature, el.predicted, 1e-7 * std::max(1.0, std::abs(el.predicted)))
            << t->name << " n=" << n << " m=" << m;
      }
    }
  }
}

TEST(Tridiagonality, OffBandVanishes) {
  for (const auto* t : {&table1(), &table2()}) {
    const double e = t->hmd[1];
    double diag_max = 0.0;
    for (int n = 0; n <= 5; ++n)
      diag_max = std::max(diag_max, std::abs(tridiagonality_check(t->spec, e, n, n).quadrature));
    for (int n = 0; n <= 5; ++n)
      for (int m = n + 2; m <= 5; ++m) {
        const auto el = tridiagonality_check(t->spec, e, n, m);
        EXPECT_EQ(el.predicted, 0.0);
        EXPECT_LT(std::abs(el.quadrature), 1e-8 * diag_max) << t->name << " n=" << n << " m=" << m;
      }
  }
}

TEST(BasisFunction, DerivativesMatchFiniteDifferences) {
  for (const auto& p : {table_i, table_ii}) {
    const auto basis = basis_for(p);
    for (int n : {0, 3, 5})
      for (double x : {0.3, 1.0, 2.5}) {
        const double h = 1e-4;
        const auto c = basis_function(basis, p.a, n, x);
        const auto lo = basis_function(basis, p.a, n, x - h);
        const auto hi = basis_function(basis, p.a, n, x + h);
        const double scale = std::abs(c.value) + std::abs(c.d1) + std::abs(c.d2) + 1e-300;
        EXPECT_NEAR(c.d1, (hi.value - lo.value) / (2 * h), 1e-6 * scale);
        EXPECT_NEAR(c.d2, (hi.value - 2 * c.value + lo.value) / (h * h), 1e-4 * scale);
      }
  }
}
