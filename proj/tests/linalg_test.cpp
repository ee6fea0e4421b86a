#include <gtest/gtest.h>

#include <cmath>

#include "projgen/linalg.hpp"
#include "test_support.hpp"

using namespace projgen;
using projgen::testing::rng;

namespace {

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

}  // namespace

TEST(ComplexMatrix, RejectsNonFiniteEntries) {
  EXPECT_THROW(ComplexMatrix::from_entries(1, 1, {Complex(NAN, 0)}), precondition_error);
  EXPECT_THROW(ComplexMatrix::from_entries(1, 1, {Complex(0, INFINITY)}), precondition_error);
  EXPECT_THROW(ComplexMatrix::from_entries(2, 2, {1.0, 2.0}), precondition_error);
}

TEST(ComplexMatrix, ProductShapeMismatchThrows) {
  EXPECT_THROW(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), precondition_error);
}

TEST(HermitianEig, IdentityHasUnitEigenvalues) {
  const Spectrum s = hermitian_eig(ComplexMatrix::identity(3));
  ASSERT_EQ(s.eigenvalues.size(), 3u);
  for (double v : s.eigenvalues) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(HermitianEig, DiagonalGivesStandardBasis) {
  const std::vector<double> d{1.0, 2.0};
  const Spectrum s = hermitian_eig(ComplexMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 1.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], 2.0);
  EXPECT_EQ(s.eigenvectors, ComplexMatrix::identity(2));
}

TEST(HermitianEig, SortsDescendingDiagonal) {
  const std::vector<double> d{3.0, -1.0, 2.0};
  const Spectrum s = hermitian_eig(ComplexMatrix::diagonal(d));
  EXPECT_EQ(s.eigenvalues, (std::vector<double>{-1.0, 2.0, 3.0}));
  EXPECT_EQ(s.eigenvectors(1, 0), Complex(1.0));
}

TEST(HermitianEig, RandomReconstructionResidual) {
  auto gen = rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = projgen::testing::random_hermitian(gen, 8);
    const Spectrum s = hermitian_eig(h);
    const double scale = std::max(1.0, operator_norm(h));
    EXPECT_LT(operator_norm(s.reconstruct() - h), 1e-10 * scale);
    EXPECT_LT(operator_norm(s.eigenvectors.adjoint() * s.eigenvectors - ComplexMatrix::identity(8)), 1e-10);
    EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
  }
}

TEST(HermitianEig, EigenvectorPhaseConvention) {
  auto gen = rng(2);
  const Spectrum s = hermitian_eig(projgen::testing::random_hermitian(gen, 6));
  for (std::size_t j = 0; j < 6; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 6; ++i)
      if (std::abs(s.eigenvectors(i, j)) > std::abs(s.eigenvectors(best, j))) best = i;
    EXPECT_EQ(s.eigenvectors(best, j).imag(), 0.0);
    EXPECT_GT(s.eigenvectors(best, j).real(), 0.0);
  }
}

TEST(HermitianEig, Deterministic) {
  auto gen = rng(3);
  const ComplexMatrix h = projgen::testing::random_hermitian(gen, 7);
  const Spectrum a = hermitian_eig(h);
  const Spectrum b = hermitian_eig(h);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(HermitianEig, Errors) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), precondition_error);
  EXPECT_THROW(hermitian_eig(ComplexMatrix::unit(2, 0, 1)), precondition_error);
}

TEST(HermitianEig, ZeroAndOneByOne) {
  EXPECT_EQ(hermitian_eig(ComplexMatrix(3, 3)).eigenvalues, std::vector<double>(3, 0.0));
  EXPECT_EQ(hermitian_eig(ComplexMatrix::from_entries(1, 1, {Complex(-2.5)})).eigenvalues,
            std::vector<double>{-2.5});
}

TEST(OperatorNorm, MatrixUnitAndDiagonal) {
  EXPECT_NEAR(operator_norm(ComplexMatrix::unit(2, 0, 1)), 1.0, 1e-15);
  const std::vector<double> d{3.0, -4.0};
  EXPECT_NEAR(operator_norm(ComplexMatrix::diagonal(d)), 4.0, 1e-14);
  EXPECT_EQ(operator_norm(ComplexMatrix(3, 3)), 0.0);
}

TEST(OperatorNorm, AgreesWithPowerIteration) {
  auto gen = rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix a = projgen::testing::random_matrix(gen, 6, 6);
    const double oracle = projgen::testing::power_iteration_norm(a);
    EXPECT_NEAR(operator_norm(a), oracle, 1e-8 * oracle);
  }
}

TEST(OperatorNorm, RectangularMatchesAdjoint) {
  auto gen = rng(5);
  const ComplexMatrix a = projgen::testing::random_matrix(gen, 3, 7);
  EXPECT_NEAR(operator_norm(a), operator_norm(a.adjoint()), 1e-12);
  EXPECT_NEAR(operator_norm(a), projgen::testing::power_iteration_norm(a), 1e-8 * operator_norm(a));
}

TEST(OperatorNorm, SubmultiplicativeAndAdjointInvariant) {
  auto gen = rng(6);
  for (int trial = 0; trial < 25; ++trial) {
    const ComplexMatrix a = projgen::testing::random_matrix(gen, 5, 5);
    const ComplexMatrix b = projgen::testing::random_matrix(gen, 5, 5);
    EXPECT_LE(operator_norm(a * b), operator_norm(a) * operator_norm(b) + 1e-10);
    EXPECT_NEAR(operator_norm(a.adjoint()), operator_norm(a), 1e-12 * std::max(1.0, operator_norm(a)));
  }
}

TEST(MatrixPowerHalf, Identity) {
  const auto id = ComplexMatrix::identity(4);
  EXPECT_LT(max_abs_diff(matrix_power_half(id, HalfPower::sqrt), id), 1e-15);
  EXPECT_LT(max_abs_diff(matrix_power_half(id, HalfPower::inv_sqrt), id), 1e-15);
}

TEST(MatrixPowerHalf, Diagonal) {
  const std::vector<double> d{4.0, 9.0};
  const std::vector<double> r{2.0, 3.0};
  EXPECT_LT(max_abs_diff(matrix_power_half(ComplexMatrix::diagonal(d), HalfPower::sqrt), ComplexMatrix::diagonal(r)),
            1e-14);
}

TEST(MatrixPowerHalf, RandomPositiveDefinite) {
  auto gen = rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix t = projgen::testing::random_positive_definite(gen, 6);
    const ComplexMatrix r = matrix_power_half(t, HalfPower::sqrt);
    const ComplexMatrix w = matrix_power_half(t, HalfPower::inv_sqrt);
    EXPECT_LT(operator_norm(r * r - t), 1e-9 * operator_norm(t));
    EXPECT_LT(operator_norm(w * r - ComplexMatrix::identity(6)), 1e-9);
    EXPECT_LT(operator_norm(r - r.adjoint()), 1e-14);
    EXPECT_LT(operator_norm(r * t - t * r), 1e-9 * operator_norm(t));
  }
}

TEST(MatrixPowerHalf, ClampsTinyNegativeAndRejectsIndefinite) {
  const std::vector<double> near_psd{-1e-14, 1.0};
  EXPECT_NO_THROW(matrix_power_half(ComplexMatrix::diagonal(near_psd), HalfPower::sqrt));
  EXPECT_THROW(matrix_power_half(ComplexMatrix::diagonal(near_psd), HalfPower::inv_sqrt), precondition_error);
  const std::vector<double> indefinite{-0.5, 1.0};
  EXPECT_THROW(matrix_power_half(ComplexMatrix::diagonal(indefinite), HalfPower::sqrt), precondition_error);
}

TEST(Residuals, Examples) {
  const ProjectionResiduals e11 = residuals(ComplexMatrix::unit(2, 0, 0));
  EXPECT_EQ(e11.self_adjointness, 0.0);
  EXPECT_EQ(e11.idempotency, 0.0);
  const ProjectionResiduals half = residuals(ComplexMatrix::identity(3) * Complex(0.5));
  EXPECT_EQ(half.self_adjointness, 0.0);
  EXPECT_NEAR(half.idempotency, 0.25, 1e-15);
}

TEST(Residuals, ClosedFormTwoProjectionPair) {
  const double eps = 0.25;
  const double off = std::sqrt(eps * (1 - eps));
  const auto p2 = ComplexMatrix::from_entries(2, 2, {eps, off, off, 1 - eps});
  const ProjectionResiduals r = residuals(p2);
  EXPECT_LT(r.self_adjointness, 1e-12);
  EXPECT_LT(r.idempotency, 1e-12);
}

TEST(SpectrumBounds, Examples) {
  const SpectrumBounds id = spectrum_bounds(ComplexMatrix::identity(3));
  EXPECT_DOUBLE_EQ(id.min, 1.0);
  EXPECT_DOUBLE_EQ(id.max, 1.0);
  const std::vector<double> d{0.5, 1.5};
  const SpectrumBounds b = spectrum_bounds(ComplexMatrix::diagonal(d));
  EXPECT_DOUBLE_EQ(b.min, 0.5);
  EXPECT_DOUBLE_EQ(b.max, 1.5);
}

TEST(EmbedBlock, PlacesBlock) {
  const auto m = embed_block(ComplexMatrix::identity(2), 0, 2, 3);
  EXPECT_EQ(m.rows(), 6u);
  EXPECT_EQ(m(0, 4), Complex(1.0));
  EXPECT_EQ(m(1, 5), Complex(1.0));
  EXPECT_EQ(extract_block(m, 0, 2, 2), ComplexMatrix::identity(2));
}
