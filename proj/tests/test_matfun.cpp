#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "miura/matfun.hpp"
#include "miura/random.hpp"

namespace {

using namespace miura;
using std::numbers::pi;

ComplexMatrix diag(std::initializer_list<cplx> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (auto x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

// f(A) = V f(D) V^{-1} through Eigen's eigensolver, independent of the
// Pade / Denman-Beavers / quadrature paths under test.
template <class F>
ComplexMatrix by_eigendecomposition(const ComplexMatrix& a, F f) {
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(a);
  ComplexVector d = solver.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(d(i));
  const ComplexMatrix& v = solver.eigenvectors();
  return v * d.asDiagonal() * v.inverse();
}

// A well-conditioned similarity transform of a prescribed diagonal.
ComplexMatrix similar_to(Xoshiro256& rng, const ComplexVector& eigenvalues) {
  const auto n = eigenvalues.size();
  const ComplexMatrix v = identity(n) + 0.3 * random_complex_normal(rng, n) / std::sqrt(static_cast<double>(n));
  return v * eigenvalues.asDiagonal() * v.inverse();
}

TEST(Expm, ZeroGivesIdentity) {
  EXPECT_EQ(expm(ComplexMatrix::Zero(3, 3)), identity(3));
}

TEST(Expm, DiagonalIsScalarExponential) {
  const ComplexMatrix e = expm(diag({std::log(2.0), cplx{0.0, pi / 2}}));
  EXPECT_NEAR(std::abs(e(0, 0) - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(1, 1) - cplx{0.0, 1.0}), 0.0, 1e-15);
  EXPECT_EQ(e(0, 1), cplx{});
}

TEST(Expm, MatchesEigendecompositionOracle) {
  Xoshiro256 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_complex_normal(rng, 8);
    const ComplexMatrix oracle = by_eigendecomposition(a, [](cplx z) { return std::exp(z); });
    EXPECT_LE((expm(a) - oracle).norm() / oracle.norm(), 1e-10) << "trial " << trial;
  }
}

TEST(Expm, EveryPadeDegreeAgainstOracle) {
  // Norms chosen to land in each approximant's range, including squaring.
  Xoshiro256 rng(12);
  for (double scale : {1e-3, 0.1, 0.6, 1.5, 4.0, 40.0}) {
    ComplexMatrix a = random_complex_normal(rng, 5);
    a *= scale / norm1(a);
    const ComplexMatrix oracle = by_eigendecomposition(a, [](cplx z) { return std::exp(z); });
    EXPECT_LE((expm(a) - oracle).norm() / oracle.norm(), 1e-11) << "norm " << scale;
  }
}

TEST(Expm, InverseIsExpOfNegative) {
  Xoshiro256 rng(13);
  for (int n : {1, 4, 9}) {
    const ComplexMatrix a = random_complex_normal(rng, n);
    EXPECT_LE((expm(a) * expm(-a) - identity(n)).norm(), n * 1e-12);
  }
}

TEST(Expm, CommutingSumFactorizes) {
  Xoshiro256 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = random_complex_normal(rng, 6);
    const ComplexMatrix b = 0.5 * a * a - cplx{0.3, 0.2} * a + identity(6);  // polynomial in a
    const ComplexMatrix lhs = expm(a + b);
    EXPECT_LE((lhs - expm(a) * expm(b)).norm() / lhs.norm(), 1e-10);
  }
}

TEST(Expm, OverflowIsReported) {
  ComplexMatrix a(2, 2);
  a << 800.0, 1.0, 0.0, 800.0;
  EXPECT_THROW(expm(a), Overflow);
  EXPECT_THROW(expm(diag({1000.0})), Overflow);
}

TEST(Expm, RejectsNonFinite) {
  ComplexMatrix a = identity(2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(expm(a), Error);
}

TEST(Logm, IdentityGivesZero) {
  EXPECT_EQ(logm_principal(identity(4)), ComplexMatrix::Zero(4, 4));
}

TEST(Logm, Diagonal) {
  const ComplexMatrix l = logm_principal(diag({std::exp(1.0), std::exp(2.0)}));
  EXPECT_NEAR(std::abs(l(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(l(1, 1) - 2.0), 0.0, 1e-15);
}

TEST(Logm, RecoversExponentInsideStrip) {
  // ||logm(expm(A)) - A|| <= 1e-9 (1 + ||A||) whenever |Im lambda| < pi.
  Xoshiro256 rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 1 + trial % 16;
    const ComplexMatrix a = random_with_spectrum_in_disk(rng, n, 0.0, 2.5);
    EXPECT_LE((logm_principal(expm(a)) - a).norm(), 1e-9 * (1.0 + a.norm())) << "n=" << n;
  }
}

TEST(Logm, PrincipalBranchForRotation) {
  // exp of [[0, -theta], [theta, 0]] is a rotation; the principal log
  // returns theta itself while |theta| < pi.
  for (double theta : {0.5, 2.0, 3.0}) {
    ComplexMatrix a(2, 2);
    a << 0.0, -theta, theta, 0.0;
    EXPECT_LE((logm_principal(expm(a)) - a).norm(), 1e-12) << theta;
  }
}

TEST(Logm, BranchCutViolation) {
  EXPECT_THROW(logm_principal(diag({-1.0, 2.0})), BranchCutViolation);
  Xoshiro256 rng(22);
  ComplexVector eig(3);
  eig << -2.0, 1.0, cplx{0.5, 1.0};
  EXPECT_THROW(logm_principal(similar_to(rng, eig)), BranchCutViolation);
  eig << 0.0, 1.0, 2.0;
  EXPECT_THROW(logm_principal(similar_to(rng, eig)), BranchCutViolation);
}

TEST(Sqrtm, IdentityAndDiagonal) {
  EXPECT_EQ(sqrtm_principal(identity(3)), identity(3));
  const ComplexMatrix s = sqrtm_principal(diag({4.0, 9.0}));
  EXPECT_EQ(s(0, 0), cplx{2.0});
  EXPECT_EQ(s(1, 1), cplx{3.0});
}

TEST(Sqrtm, PositiveDefiniteSquaresBackAndMatchesExpHalfLog) {
  Xoshiro256 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix b = random_complex_normal(rng, 8);
    const ComplexMatrix m = b * b.adjoint() + 0.5 * identity(8);
    const ComplexMatrix s = sqrtm_principal(m);
    EXPECT_LE((s * s - m).norm() / m.norm(), 1e-10);
    EXPECT_LE((s - expm(0.5 * logm_principal(m))).norm() / s.norm(), 1e-10);
  }
}

TEST(Sqrtm, SpectrumInRightHalfPlane) {
  Xoshiro256 rng(32);
  ComplexVector eig(4);
  eig << cplx{-3.0, 0.2}, cplx{-1.0, -0.5}, cplx{0.0, 2.0}, 5.0;
  const ComplexMatrix m = similar_to(rng, eig);
  const ComplexMatrix s = sqrtm_principal(m);
  EXPECT_LE((s * s - m).norm() / m.norm(), 1e-10);
  for (auto lambda : spectrum(s).eigenvalues) EXPECT_GT(lambda.real(), 0.0);
}

TEST(Sqrtm, BranchCutViolation) {
  EXPECT_THROW(sqrtm_principal(diag({-4.0, 1.0})), BranchCutViolation);
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;  // eigenvalues +-1
  EXPECT_THROW(sqrtm_principal(m), BranchCutViolation);
}

TEST(RieszDunford, ExpOfZero) {
  const Contour c{0.0, 1.5, 32};
  EXPECT_LE((riesz_dunford(ScalarFunction::exp, ComplexMatrix::Zero(3, 3), c) - identity(3)).norm(), 1e-14);
}

TEST(RieszDunford, LogOfDiagonal) {
  const Contour c{2.5, 1.0, 64};
  const ComplexMatrix l = riesz_dunford(ScalarFunction::log, diag({2.0, 3.0}), c);
  EXPECT_NEAR(std::abs(l(0, 0) - std::log(2.0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(l(1, 1) - std::log(3.0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(l(0, 1)), 0.0, 1e-10);
}

TEST(RieszDunford, AgreesWithLogm) {
  Xoshiro256 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_with_spectrum_in_disk(rng, 6, 3.0, 1.0);
    const ComplexMatrix l = riesz_dunford(ScalarFunction::log, m, fit_contour(ScalarFunction::log, m));
    EXPECT_LE(relative_difference(l, logm_principal(m)), 1e-8);
  }
}

TEST(RieszDunford, SqrtAndExpAgreeWithDirectRoutes) {
  Xoshiro256 rng(42);
  const ComplexMatrix m = random_with_spectrum_in_disk(rng, 5, cplx{2.0, 1.0}, 0.8);
  EXPECT_LE(relative_difference(riesz_dunford(ScalarFunction::sqrt, m, fit_contour(ScalarFunction::sqrt, m)),
                                sqrtm_principal(m)),
            1e-10);
  EXPECT_LE(relative_difference(riesz_dunford(ScalarFunction::exp, m, fit_contour(ScalarFunction::exp, m)), expm(m)),
            1e-10);
}

TEST(RieszDunford, ConvergesSpectrallyInNodeCount) {
  const ComplexMatrix m = diag({2.0, 3.0});
  const ComplexMatrix exact = diag({std::log(2.0), std::log(3.0)});
  double previous = 1.0;
  for (int nodes : {4, 8, 16, 32}) {
    const double err = (riesz_dunford(ScalarFunction::log, m, {2.5, 1.0, nodes}) - exact).norm();
    EXPECT_LT(err, previous * 0.1) << nodes;
    previous = err;
  }
}

TEST(RieszDunford, ContourViolations) {
  // Eigenvalue 3.0 sits on the circle |z - 2| = 1.
  EXPECT_THROW(riesz_dunford(ScalarFunction::log, diag({2.0, 3.0}), {2.0, 1.0, 64}), ContourViolation);
  // Circle around 0.5 of radius 1 crosses the cut.
  EXPECT_THROW(riesz_dunford(ScalarFunction::log, diag({0.6}), {0.5, 1.0, 64}), ContourViolation);
  // exp has no cut, so the same circle is fine.
  EXPECT_NO_THROW(riesz_dunford(ScalarFunction::exp, diag({0.6}), {0.5, 1.0, 64}));
  ComplexMatrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;
  EXPECT_THROW(fit_contour(ScalarFunction::log, swap), ContourViolation);
}

TEST(Spectrum, Identity) {
  const SpectralInfo info = spectrum(identity(3));
  ASSERT_EQ(info.eigenvalues.size(), 3u);
  for (auto l : info.eigenvalues) EXPECT_NEAR(std::abs(l - 1.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(info.min_distance_to_branch_cut, 1.0);
  EXPECT_FALSE(info.touches_branch_cut());
}

TEST(Spectrum, NegativeEigenvalueTouchesCut) {
  const SpectralInfo info = spectrum(diag({-1.0, 2.0}));
  EXPECT_EQ(info.min_distance_to_branch_cut, 0.0);
  EXPECT_TRUE(info.touches_branch_cut());
}

TEST(Spectrum, CompanionOfQuadraticHasItsRoots) {
  // z^2 - 1 = 0 has roots +-1.
  ComplexMatrix c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  auto eig = spectrum(c).eigenvalues;
  std::sort(eig.begin(), eig.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  EXPECT_NEAR(std::abs(eig[0] + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(eig[1] - 1.0), 0.0, 1e-14);
}

TEST(Spectrum, DistanceToCut) {
  EXPECT_DOUBLE_EQ(distance_to_branch_cut({3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(distance_to_branch_cut({-3.0, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(distance_to_branch_cut({-3.0, 0.0}), 0.0);
}

TEST(Solve, Basics) {
  Xoshiro256 rng(51);
  const ComplexMatrix b = random_complex_normal(rng, 3);
  EXPECT_EQ(solve(identity(3), b), b);
  const ComplexMatrix x = solve(diag({2.0, 4.0}), identity(2));
  EXPECT_EQ(x(0, 0), cplx{0.5});
  EXPECT_EQ(x(1, 1), cplx{0.25});
}

TEST(Solve, ResidualOnRandomSystems) {
  Xoshiro256 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_complex_normal(rng, 10) + 4.0 * identity(10);
    const ComplexMatrix b = random_complex_normal(rng, 10);
    EXPECT_LE((m * solve(m, b) - b).norm(), 1e-12 * b.norm());
  }
}

TEST(Solve, SingularCarriesConditionEstimate) {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 2.0, 4.0;
  try {
    solve(m, identity(2));
    FAIL() << "expected SingularMatrix";
  } catch (const SingularMatrix& e) {
    EXPECT_GT(e.condition(), kSingularCondition);
  }
  m << 1.0, 0.0, 0.0, 1e-14;
  EXPECT_THROW(solve(m, identity(2)), SingularMatrix);
}

TEST(DiagonalExactness, AllFunctionsEntrywiseExact) {
  Xoshiro256 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix d = ComplexMatrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i) d(i, i) = cplx{rng.uniform(0.1, 3.0), rng.uniform(-2.0, 2.0)};
    const ComplexMatrix e = expm(d), l = logm_principal(d), s = sqrtm_principal(d);
    for (int i = 0; i < 5; ++i) {
      EXPECT_EQ(e(i, i), std::exp(d(i, i)));
      EXPECT_EQ(l(i, i), std::log(d(i, i)));
      EXPECT_EQ(s(i, i), std::sqrt(d(i, i)));
    }
    EXPECT_TRUE(is_diagonal(e) && is_diagonal(l) && is_diagonal(s));
  }
}

TEST(Random, SeedDeterminesStream) {
  Xoshiro256 a(7), b(7), c(8);
  for (int i = 0; i < 5; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
  // Reference output of xoshiro256** seeded through splitmix64 with seed 0.
  Xoshiro256 zero(0);
  EXPECT_EQ(zero(), 0x99ec5f36cb75f2b4ULL);
}

}  // namespace
