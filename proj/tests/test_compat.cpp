#include <gtest/gtest.h>

#include <cmath>

#include "povmc/compat.hpp"
#include "povmc/errors.hpp"
#include "povmc/random.hpp"
#include "support.hpp"

using namespace povmc;
using namespace povmc::testing;

namespace {

MeasurementData xz(double eta) { return {binary(pauli_x(), eta), binary(pauli_z(), eta)}; }

// Every deterministic strategy must see a nonpositive witness operator.
double worst_strategy_eigenvalue(const Witness& w) {
  std::vector<int> outs;
  for (const auto& f : w.operators) outs.push_back(int(f.size()));
  const StrategySpace space(outs);
  double worst = -1e300;
  for (int l = 0; l < space.count(); ++l) {
    Matrix s = Matrix::Zero(w.operators[0][0].rows(), w.operators[0][0].cols());
    for (int x = 0; x < space.settings(); ++x) s += w.operators[x][space.outcome(l, x)];
    worst = std::max(worst, max_eigenvalue(s));
  }
  return worst;
}

}  // namespace

TEST(Compat, StrategySpaceMixedRadix) {
  const StrategySpace s({2, 3});
  EXPECT_EQ(s.count(), 6);
  EXPECT_EQ(s.outcome(5, 0), 1);
  EXPECT_EQ(s.outcome(5, 1), 2);
  EXPECT_EQ(s.outcome(2, 0), 0);
  EXPECT_EQ(s.outcome(2, 1), 1);
}

TEST(Compat, NoisyXzThreshold) {
  const auto below = jm_test(xz(0.70));
  ASSERT_TRUE(below.compatible);
  ASSERT_TRUE(below.parent.has_value());
  EXPECT_LT(max_deviation(below.parent->reconstruct(), xz(0.70)), 1e-7);
  EXPECT_TRUE(below.certificate.ok);

  const auto above = jm_test(xz(0.72));
  ASSERT_FALSE(above.compatible);
  ASSERT_TRUE(above.witness.has_value());
  EXPECT_GT(above.witness->value, 0.0);
  EXPECT_LE(worst_strategy_eigenvalue(*above.witness), 1e-9);
  EXPECT_TRUE(above.certificate.ok);
}

TEST(Compat, XzRobustness) {
  const auto r = jm_depolarizing_robustness(MeasurementSet(xz(1.0)));
  EXPECT_TRUE(r.certified);
  EXPECT_NEAR(r.eta, 1.0 / std::sqrt(2.0), 2e-4);
  EXPECT_LE(r.lo, r.hi);
}

TEST(Compat, XyzRobustness) {
  const MeasurementSet ms(MeasurementData{binary(pauli_x()), binary(pauli_y()), binary(pauli_z())});
  const auto r = jm_depolarizing_robustness(ms);
  EXPECT_NEAR(r.eta, 1.0 / std::sqrt(3.0), 2e-4);
}

TEST(Compat, CommutingSetIsCompatible) {
  const MeasurementData zz{binary(pauli_z()), binary(pauli_z(), 0.6)};
  EXPECT_TRUE(jm_test(zz).compatible);
  const auto r = jm_depolarizing_robustness(MeasurementSet(zz));
  EXPECT_DOUBLE_EQ(r.eta, 1.0);
}

TEST(Compat, RandomPostProcessingsAreCompatible) {
  Rng rng(31);
  for (int t = 0; t < 3; ++t) {
    const auto ms = random_jm_set(3, 2, 3, 4, rng);
    const auto r = jm_test(ms);
    EXPECT_TRUE(r.compatible);
    EXPECT_TRUE(r.certificate.ok);
  }
}

TEST(Compat, RefusesAboveStrategyCap) {
  CompatOptions opt;
  opt.strategy_cap = 8;
  const MeasurementData xyz{binary(pauli_x()), binary(pauli_y()), binary(pauli_z())};
  EXPECT_NO_THROW(jm_test(xyz, opt));
  const MeasurementData four{binary(pauli_x()), binary(pauli_y()), binary(pauli_z()), binary(pauli_x())};
  EXPECT_THROW(jm_test(four, opt), RefusalError);
}

TEST(Compat, SteeringMaximallyMixedMatchesJm) {
  const Assemblage a = sandwich(DensityState::maximally_mixed(2), MeasurementSet(xz(1.0)));
  const auto r = lhs_robustness(a);
  EXPECT_NEAR(r.eta, 1.0 / std::sqrt(2.0), 2e-4);
  const auto steer = lhs_test(a);
  EXPECT_FALSE(steer.unsteerable);
  ASSERT_TRUE(steer.witness.has_value());
  EXPECT_GT(steer.witness->value, 0.0);
}

TEST(Compat, LhsModelReconstructs) {
  const Assemblage a = sandwich(DensityState::maximally_mixed(2), MeasurementSet(xz(0.6)));
  const auto r = lhs_test(a);
  ASSERT_TRUE(r.unsteerable);
  ASSERT_TRUE(r.model.has_value());
  EXPECT_TRUE(validate_lhs_model(*r.model).ok());
  EXPECT_LT(max_deviation(r.model->reconstruct(), a.members()), 1e-7);
}

TEST(Compat, LhsSeparableRoundTrip) {
  const Assemblage a = sandwich(DensityState::maximally_mixed(2), MeasurementSet(xz(0.6)));
  const auto m = *lhs_test(a).model;
  const auto sep = lhs_to_separable_preparation(m);
  const Matrix rho = sep.ensemble.state();
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-9);
  EXPECT_GE(min_eigenvalue(rho), -1e-9);
  const auto from_state = assemblage_data_from(rho, sep.ensemble.shape, sep.measurements);
  EXPECT_LT(max_deviation(from_state, a.members()), 1e-7);
  const LhsModel back = separable_preparation_to_lhs(sep.ensemble, sep.measurements);
  EXPECT_LT(max_deviation(back.reconstruct(), a.members()), 1e-7);
}

TEST(Compat, AssemblageNoiseEndpoints) {
  const Assemblage a = sandwich(DensityState::maximally_mixed(2), MeasurementSet(xz(1.0)));
  EXPECT_LT(max_deviation(assemblage_noise(a.members(), 1.0), a.members()), 1e-15);
  const auto flat = assemblage_noise(a.members(), 0.0);
  for (const auto& f : flat)
    for (const auto& m : f) EXPECT_LT(max_abs(m - Matrix::Identity(2, 2) / 4.0), 1e-14);
}
