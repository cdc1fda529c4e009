#include <gtest/gtest.h>

#include "povmc/random.hpp"
#include "povmc/sdp.hpp"
#include "support.hpp"

using namespace povmc;
using povmc::testing::max_abs;

namespace {

Matrix unit(int d, int i, int j) {
  Matrix m = Matrix::Zero(d, d);
  m(i, j) = 1;
  return m;
}

}  // namespace

TEST(Sdp, HermitianBasisIsOrthonormal) {
  const auto basis = hermitian_basis(3);
  ASSERT_EQ(basis.size(), 9u);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    EXPECT_LT(hermiticity_defect(basis[i]), 1e-15);
    for (std::size_t j = 0; j < basis.size(); ++j)
      EXPECT_NEAR((basis[i] * basis[j]).trace().real(), i == j ? 1.0 : 0.0, 1e-14);
  }
  std::vector<double> y(9);
  for (int q = 0; q < 9; ++q) y[q] = q + 1;
  const Matrix m = dual_matrix(y, 0, 3);
  for (int q = 0; q < 9; ++q) EXPECT_NEAR((m * basis[q]).trace().real(), y[q], 1e-13);
}

TEST(Sdp, DiagonalConstraintsForceIdentity) {
  SdpProblem p;
  const int b = p.add_block("X", 2);
  p.add_constraint({{b, unit(2, 0, 0)}}, 1);
  p.add_constraint({{b, unit(2, 1, 1)}}, 1);
  p.set_objective({{b, Matrix::Identity(2, 2)}});
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-7);
  EXPECT_TRUE(verify_certificate(p, s).ok);
}

TEST(Sdp, NegativeTraceIsInfeasibleWithFarkasVector) {
  SdpProblem p;
  const int b = p.add_block("X", 2);
  p.add_constraint({{b, Matrix::Identity(2, 2)}}, -1);
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::infeasible);
  EXPECT_GT(s.certified_margin, 0.0);
  EXPECT_GT(farkas_margin(p, s.duals), 0.0);
  EXPECT_TRUE(verify_certificate(p, s).ok);
}

TEST(Sdp, MinimumEigenvalueProgram) {
  Matrix c(3, 3);
  c << 1, cplx(0, 2), 0, cplx(0, -2), 0, 1, 0, 1, -1;
  SdpProblem p;
  const int b = p.add_block("X", 3);
  p.add_constraint({{b, Matrix::Identity(3, 3)}}, 1);
  p.set_objective({{b, c}});
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, min_eigenvalue(c), 1e-6);
  EXPECT_TRUE(verify_certificate(p, s).ok);
}

TEST(Sdp, RealBlockMinEigenvalue) {
  Matrix c(2, 2);
  c << 2, 1, 1, 2;
  SdpProblem p;
  const int b = p.add_block("X", 2, true);
  p.add_constraint({{b, Matrix::Identity(2, 2)}}, 1);
  p.set_objective({{b, c}});
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, 1.0, 1e-6);
}

TEST(Sdp, MatrixEqualityWithDependentRows) {
  // X + Y = T with the same equality added twice; the redundant rows must be
  // dropped silently.
  Rng rng(21);
  const Matrix t = random_density(3, rng);
  SdpProblem p;
  const int x = p.add_block("X", 3), y = p.add_block("Y", 3);
  p.add_sum_equality({x, y}, t);
  p.add_sum_equality({x, y}, t);
  p.set_objective({{y, Matrix::Identity(3, 3)}});
  const auto s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::optimal);
  EXPECT_NEAR(s.primal_objective, 0.0, 1e-6);
  EXPECT_LT(max_abs(s.blocks[x] - t), 1e-5);
}

TEST(Sdp, InconsistentDuplicateRowsAreInfeasible) {
  SdpProblem p;
  const int b = p.add_block("X", 2);
  p.add_constraint({{b, Matrix::Identity(2, 2)}}, 1);
  p.add_constraint({{b, Matrix::Identity(2, 2)}}, 2);
  const auto s = solve(p);
  EXPECT_EQ(s.status, SdpStatus::infeasible);
}

TEST(Sdp, VerifyCatchesTamperedSolution) {
  SdpProblem p;
  const int b = p.add_block("X", 2);
  p.add_constraint({{b, unit(2, 0, 0)}}, 1);
  p.add_constraint({{b, unit(2, 1, 1)}}, 1);
  p.set_objective({{b, Matrix::Identity(2, 2)}});
  auto s = solve(p);
  s.blocks[0](0, 0) += 0.1;
  const auto r = verify_certificate(p, s);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.breaches.empty());
}
