#include <gtest/gtest.h>

#include "povmc/errors.hpp"
#include "povmc/linalg.hpp"
#include "povmc/random.hpp"
#include "support.hpp"

using namespace povmc;
using povmc::testing::max_abs;

TEST(Linalg, KroneckerIndexConvention) {
  Vector a = Vector::Zero(2), b = Vector::Zero(3);
  a(1) = 1;
  b(2) = 1;
  const Vector ab = kron(a, b);
  EXPECT_EQ(ab(1 * 3 + 2), cplx(1, 0));
  EXPECT_NEAR(ab.norm(), 1.0, 1e-15);
}

TEST(Linalg, VecToOpMatchesDefinition) {
  Rng rng(1);
  const BipartiteShape s{3, 2};
  const Vector phi = haar_vector(6, rng);
  const Matrix f = vec_to_op(phi, s);
  ASSERT_EQ(f.rows(), 3);
  ASSERT_EQ(f.cols(), 2);
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 2; ++k) EXPECT_EQ(f(m, k), phi(m * 2 + k));
  EXPECT_LT((op_to_vec(f) - phi).norm(), 1e-15);
}

TEST(Linalg, HermitianEigDescendingAndReconstructs) {
  Rng rng(2);
  const Matrix g = ginibre(4, 4, rng);
  const Matrix h = g + g.adjoint();
  const auto e = hermitian_eig(h);
  for (int i = 1; i < 4; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
  const Matrix back = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LT(max_abs(back - h), 1e-12);
  EXPECT_THROW(hermitian_eig(g), ValidationError);
}

TEST(Linalg, SqrtAndInverseSqrt) {
  Rng rng(3);
  const Matrix rho = random_faithful_density(3, 0.05, rng);
  const Matrix s = matrix_sqrt(rho);
  EXPECT_LT(max_abs(s * s - rho), 1e-12);
  EXPECT_LT(max_abs(inv_sqrt_full_rank(rho) * s - Matrix::Identity(3, 3)), 1e-10);
  Matrix singular = Matrix::Zero(2, 2);
  singular(0, 0) = 1;
  EXPECT_THROW(inv_sqrt_full_rank(singular), DomainError);
  EXPECT_LT(max_abs(pinv_sqrt(singular) - singular), 1e-14);
}

TEST(Linalg, PartialTraceOfProduct) {
  Rng rng(4);
  const Matrix a = random_density(2, rng), b = random_density(3, rng);
  const BipartiteShape s{2, 3};
  EXPECT_LT(max_abs(partial_trace(kron(a, b), s, Side::A) - b), 1e-14);
  EXPECT_LT(max_abs(partial_trace(kron(a, b), s, Side::B) - a), 1e-14);
}

TEST(Linalg, SchmidtDecompositionReconstructs) {
  Rng rng(5);
  const BipartiteShape s{3, 4};
  const Vector phi = random_schmidt_rank_vector(s, 2, rng);
  const auto sd = schmidt_decompose(phi, s);
  Vector back = Vector::Zero(12);
  for (int i = 0; i < sd.coefficients.size(); ++i)
    back += sd.coefficients(i) * kron(Vector(sd.left.col(i)), Vector(sd.right.col(i)));
  EXPECT_LT((back - phi).norm(), 1e-12);
  EXPECT_EQ(schmidt_rank(phi, s), 2);
  EXPECT_THROW(schmidt_decompose(Vector::Zero(12), s), DomainError);
}

TEST(Linalg, PurificationMarginals) {
  Rng rng(6);
  const Matrix sigma = random_faithful_density(3, 0.02, rng);
  const Vector psi = purify(sigma);
  const Matrix p = psi * psi.adjoint();
  const BipartiteShape s{3, 3};
  EXPECT_LT(max_abs(partial_trace(p, s, Side::A) - sigma), 1e-12);
  EXPECT_LT(max_abs(partial_trace(p, s, Side::B) - sigma), 1e-12);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-14);
}

TEST(Linalg, TransposeInBasis) {
  Rng rng(7);
  const Matrix u = haar_unitary(3, rng);
  const Matrix m = ginibre(3, 3, rng);
  const Matrix t = transpose_in_basis(m, u);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      const cplx lhs = (u.col(j).adjoint() * t * u.col(k))(0, 0);
      const cplx rhs = (u.col(k).adjoint() * m * u.col(j))(0, 0);
      EXPECT_LT(std::abs(lhs - rhs), 1e-12);
    }
  EXPECT_LT(max_abs(transpose_in_basis(m, Matrix::Identity(3, 3)) - m.transpose()), 1e-14);
}

TEST(Linalg, CompleteBasisIsUnitary) {
  Rng rng(8);
  const Matrix u = haar_unitary(4, rng);
  const Matrix full = complete_basis(u.leftCols(2));
  EXPECT_LT(max_abs(full.adjoint() * full - Matrix::Identity(4, 4)), 1e-12);
  EXPECT_LT(max_abs(full.leftCols(2) - u.leftCols(2)), 1e-12);
}

TEST(Linalg, PsdProjectionAndDistances) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1;
  h(1, 1) = -0.5;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1;
  EXPECT_LT(max_abs(psd_projection(h) - expect), 1e-15);
  EXPECT_NEAR(trace_distance(h, Matrix::Zero(2, 2)), 0.75, 1e-14);
  EXPECT_EQ(numerical_rank(expect), 1);
}
