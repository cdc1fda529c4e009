#include <gtest/gtest.h>

#include <cmath>

#include "povmc/compress.hpp"
#include "povmc/errors.hpp"
#include "povmc/random.hpp"
#include "support.hpp"

using namespace povmc;
using namespace povmc::testing;

namespace {

// Rank-2 model on C^3: Kraus operators C^3 -> C^2 with random measurements.
PointwiseKrausModel random_two_sim(Rng& rng) {
  const auto k = random_kraus(3, 2, 3, 2, rng);
  std::vector<PointwiseKrausModel::Branch> br;
  for (const auto& op : k) {
    PointwiseKrausModel::Branch b;
    b.weight = 1.0 / 3.0;
    b.kraus = std::sqrt(3.0) * op;
    b.measurements = {random_povm(2, 2, rng), random_projective(2, rng)};
    br.push_back(b);
  }
  return PointwiseKrausModel(br, 2);
}

Matrix embedded_projector(double c, double s) {
  Vector v = Vector::Zero(3);
  v(0) = c;
  v(1) = s;
  return v * v.adjoint();
}

// Qubit X/Z inside span{0, 1}, with |2><2| added to outcome 0.
MeasurementSet embedded_pair() {
  Matrix p2 = Matrix::Zero(3, 3);
  p2(2, 2) = 1;
  const double r = std::sqrt(0.5);
  return MeasurementSet(MeasurementData{{embedded_projector(1, 0) + p2, embedded_projector(0, 1)},
                                        {embedded_projector(r, r) + p2, embedded_projector(r, -r)}});
}

}  // namespace

TEST(Compress, RankBoundEnforced) {
  Rng rng(41);
  const auto k = random_kraus(3, 3, 1, 3, rng);
  PointwiseKrausModel::Branch b{1.0, k[0], {random_povm(3, 2, rng)}, std::nullopt};
  EXPECT_THROW(PointwiseKrausModel({b}, 2), ValidationError);
  EXPECT_NO_THROW(PointwiseKrausModel({b}, 3));
}

TEST(Compress, JmToOneSimAndBack) {
  Rng rng(42);
  const MeasurementData ms = random_jm_set(3, 2, 2, 3, rng);
  const auto jm = jm_test(ms);
  ASSERT_TRUE(jm.compatible);
  const auto sim = one_sim_from_jm(*jm.parent);
  EXPECT_EQ(sim.rank_bound(), 1);
  EXPECT_LT(max_deviation(eval_simulation(sim), ms), 1e-7);
  const ResponseParent rp = jm_from_one_sim(sim);
  EXPECT_LT(max_deviation(rp.reconstruct(), ms), 1e-7);
  EXPECT_LT(max_deviation(rp.deterministic().reconstruct(), ms), 1e-7);
}

TEST(Compress, OneSimRejectsHigherRank) {
  Rng rng(43);
  EXPECT_THROW(jm_from_one_sim(random_two_sim(rng)), Error);
}

TEST(Compress, SimPrepRoundTrip) {
  Rng rng(44);
  const auto sim = random_two_sim(rng);
  const MeasurementData m = eval_simulation(sim);
  const DensityState sigma(random_faithful_density(3, 0.05, rng));
  const PreparationModel prep = sim_to_prep(sim, sigma);
  EXPECT_TRUE(validate_preparation_model(prep).ok());
  EXPECT_EQ(prep.rank_bound, 2);
  const Assemblage target = sandwich(sigma, MeasurementSet(m));
  EXPECT_LT(max_deviation(prep.reconstruct(), target.members()), 1e-9);
  const auto back = prep_to_sim(prep, sigma);
  EXPECT_LE(back.rank_bound(), 2);
  EXPECT_LT(max_deviation(eval_simulation(back), m), 1e-8);
}

TEST(Compress, PebExtractionReproducesChannel) {
  Rng rng(45);
  const KrausChannel c(random_kraus(3, 3, 4, 2, rng));
  const DensityState sigma(random_faithful_density(3, 0.05, rng));
  const PureDecomposition dec = kraus_to_choi_sn_witness(c, sigma);
  for (std::size_t i = 0; i < dec.vectors.size(); ++i)
    EXPECT_LE(schmidt_rank(dec.vectors[i], dec.shape), 2);
  const WeightedKraus wk = peb_kraus_extraction(dec, sigma);
  EXPECT_LE(wk.max_rank(), 2);
  const Matrix rho = random_density(3, rng);
  EXPECT_LT(max_abs(wk.apply(rho) - apply_channel(c, rho)), 1e-9);
  const Matrix a = random_density(3, rng);
  EXPECT_LT(max_abs(wk.heisenberg(a) - heisenberg_apply(c, a)), 1e-9);
}

TEST(Compress, ChoiWitnessAtMaximallyMixed) {
  Rng rng(46);
  const KrausChannel c(random_kraus(2, 3, 3, 2, rng));
  const PureDecomposition dec = kraus_to_choi_sn_witness(c);
  EXPECT_LT(max_abs(dec.reconstruct() - choi_of_channel(c).matrix()), 1e-12);
}

TEST(Compress, SeesawNeverBelowLhs) {
  const MeasurementSet ms = embedded_pair();
  const Assemblage a = sandwich(DensityState::maximally_mixed(3), ms);
  const double lhs = lhs_robustness(a).eta;
  SeesawOptions so;
  so.n = 2;
  so.restarts = 2;
  so.seed = 7;
  const auto r = seesaw_n_prep(a, so);
  EXPECT_GE(r.visibility, lhs - 1e-3);
  ASSERT_TRUE(r.model.has_value());
  EXPECT_LE(r.model->rank_bound, 2);
  EXPECT_LT(r.residual, 1e-6);
}

TEST(Compress, SeesawIsDeterministicForSeed) {
  const Assemblage a = sandwich(DensityState::maximally_mixed(2), MeasurementSet(MeasurementData{
                                    binary(pauli_x()), binary(pauli_z())}));
  SeesawOptions so;
  so.n = 1;
  so.restarts = 2;
  so.seed = 3;
  so.max_rounds = 10;
  EXPECT_EQ(seesaw_n_prep(a, so).visibility, seesaw_n_prep(a, so).visibility);
}

TEST(Compress, MinCompressionDimQubit) {
  const MeasurementSet ms(MeasurementData{binary(pauli_x()), binary(pauli_z())});
  const auto e = min_compression_dim(ms, DensityState::maximally_mixed(2), 2);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_FALSE(e[0].success);
  EXPECT_TRUE(e[0].exact);
  EXPECT_TRUE(e[1].success);
}

TEST(Compress, MinCompressionDimCompatible) {
  const MeasurementSet ms(MeasurementData{binary(pauli_x(), 0.6), binary(pauli_z(), 0.6)});
  const auto e = min_compression_dim(ms, DensityState::maximally_mixed(2), 2);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_TRUE(e[0].success);
  EXPECT_TRUE(e[0].exact);
}
