#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "povmc/serialize.hpp"
#include "support.hpp"

using namespace povmc;
using namespace povmc::testing;
using io::json;

namespace {

// Text round trip: dump, parse, dump again.
json reparse(const json& doc) {
  const json back = io::parse(io::dump(doc));
  EXPECT_EQ(io::dump(back), io::dump(doc));
  return back;
}

void expect_same(const std::vector<EffectList>& a, const std::vector<EffectList>& b) {
  EXPECT_EQ(max_deviation(a, b), 0.0);
}

std::string pointer_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::SchemaError& e) {
    return e.pointer();
  }
  return "<no error>";
}

}  // namespace

TEST(Serialize, ComplexAndMatrixExact) {
  Rng rng(51);
  const Matrix m = ginibre(3, 2, rng);
  EXPECT_EQ(io::decode_matrix(io::parse(io::dump(io::encode(m))), ""), m);
  const cplx z(0.1, -1.0 / 3.0);
  EXPECT_EQ(io::decode_complex(io::parse(io::dump(io::encode(z))), ""), z);
  const Vector v = haar_vector(4, rng);
  EXPECT_EQ(io::decode_vector(io::parse(io::dump(io::encode(v))), ""), v);
}

TEST(Serialize, StateAndMeasurements) {
  Rng rng(52);
  const DensityState s(random_density(3, rng));
  EXPECT_EQ(io::read_state(reparse(io::to_document(s))).matrix(), s.matrix());
  const MeasurementSet ms(MeasurementData{random_povm(3, 4, rng), random_projective(3, rng)});
  expect_same(io::read_measurement_set(reparse(io::to_document(ms))).data(), ms.data());
  const Assemblage a = sandwich(s, ms);
  expect_same(io::read_assemblage(reparse(io::to_document(a))).members(), a.members());
}

TEST(Serialize, ChannelsAndInstruments) {
  Rng rng(53);
  const KrausChannel c(random_kraus(2, 3, 3, 2, rng));
  const auto c2 = io::read_kraus_channel(reparse(io::to_document(c)));
  ASSERT_EQ(c2.ops().size(), c.ops().size());
  for (std::size_t i = 0; i < c.ops().size(); ++i) EXPECT_EQ(c2.ops()[i], c.ops()[i]);
  const ChoiMatrix j = choi_of_channel(c);
  const ChoiMatrix j2 = io::read_choi(reparse(io::to_document(j)));
  EXPECT_EQ(j2.matrix(), j.matrix());
  EXPECT_EQ(j2.shape(), j.shape());
  const Instrument ins({{c.ops()[0]}, {c.ops()[1], c.ops()[2]}});
  const Instrument ins2 = io::read_instrument(reparse(io::to_document(ins)));
  ASSERT_EQ(ins2.branches(), 2);
  EXPECT_EQ(ins2.branch(1)[1], ins.branch(1)[1]);
}

TEST(Serialize, ModelsRoundTrip) {
  const MeasurementData xz{binary(pauli_x(), 0.6), binary(pauli_z(), 0.6)};
  const auto jm = jm_test(xz);
  ASSERT_TRUE(jm.compatible);
  const ParentModel p2 = io::read_parent_model(reparse(io::to_document(*jm.parent)));
  expect_same(p2.reconstruct(), jm.parent->reconstruct());

  const PointwiseKrausModel sim = one_sim_from_jm(*jm.parent);
  const auto sim2 = io::read_pointwise_model(reparse(io::to_document(sim)));
  expect_same(eval_simulation(sim2), eval_simulation(sim));
  EXPECT_EQ(sim2.rank_bound(), sim.rank_bound());

  const ResponseParent rp = jm_from_one_sim(sim);
  expect_same(io::read_response_parent(reparse(io::to_document(rp))).reconstruct(), rp.reconstruct());

  const DensityState sigma = DensityState::maximally_mixed(2);
  const PreparationModel pm = sim_to_prep(sim, sigma);
  expect_same(io::read_preparation_model(reparse(io::to_document(pm))).reconstruct(), pm.reconstruct());

  const Assemblage a = sandwich(sigma, MeasurementSet(xz));
  const LhsModel lhs = *lhs_test(a).model;
  const LhsModel lhs2 = io::read_lhs_model(reparse(io::to_document(lhs)));
  expect_same(lhs2.reconstruct(), lhs.reconstruct());
  EXPECT_EQ(lhs2.response, lhs.response);

  const SeparablePreparation sep = lhs_to_separable_preparation(lhs);
  const auto sep2 = io::read_separable_preparation(reparse(io::to_document(sep)));
  EXPECT_EQ(sep2.ensemble.state(), sep.ensemble.state());
  expect_same(sep2.measurements, sep.measurements);
}

TEST(Serialize, WitnessAndDecompositions) {
  const MeasurementData xz{binary(pauli_x()), binary(pauli_z())};
  const Witness w = *jm_test(xz).witness;
  const Witness w2 = io::read_witness(reparse(io::to_document(w)));
  expect_same(w2.operators, w.operators);
  EXPECT_EQ(w2.value, w.value);
  EXPECT_EQ(w2.repair, w.repair);

  Rng rng(54);
  const KrausChannel c(random_kraus(2, 2, 2, 2, rng));
  const PureDecomposition dec = kraus_to_choi_sn_witness(c);
  const PureDecomposition dec2 = io::read_pure_decomposition(reparse(io::to_document(dec)));
  EXPECT_EQ(dec2.reconstruct(), dec.reconstruct());
  EXPECT_EQ(dec2.shape, dec.shape);

  const WeightedKraus wk{{0.25, 0.75}, {c.ops()[0], c.ops()[1]}};
  const WeightedKraus wk2 = io::read_weighted_kraus(reparse(io::to_document(wk)));
  EXPECT_EQ(wk2.weights, wk.weights);
  EXPECT_EQ(wk2.kraus[1], wk.kraus[1]);
}

TEST(Serialize, ScanRowsAndConfig) {
  std::vector<ScanRow> rows(2);
  rows[0] = {2, 8, 0.1 + 0.2, true, 1, 1.0 / 3.0, "certified"};
  rows[1] = {3, 8, 0.7, false, 2, 0.5, "error: x"};
  const auto back = io::read_scan(reparse(io::to_document(rows)));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].eta_star, rows[0].eta_star);
  EXPECT_EQ(back[0].visibility, rows[0].visibility);
  EXPECT_EQ(back[1].cert_status, "error: x");

  ScanOptions o;
  o.dims = {2, 4};
  o.sigma = SigmaChoice::thermal;
  o.beta = 0.3;
  o.bin_edges = {-std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity()};
  const ScanOptions o2 = io::read_scan_config(reparse(io::to_document(o)));
  EXPECT_EQ(o2.dims, o.dims);
  EXPECT_EQ(o2.sigma, o.sigma);
  EXPECT_EQ(o2.beta, o.beta);
  ASSERT_EQ(o2.bin_edges.size(), 3u);
  EXPECT_TRUE(std::isinf(o2.bin_edges[0]) && o2.bin_edges[0] < 0);
}

TEST(Serialize, PointerErrors) {
  const json bad_entry = io::parse(R"({"schema":"povmc/1","type":"state","matrix":[[[1,0],[0,0]],[[0,0],"x"]]})");
  EXPECT_EQ(pointer_of([&] { io::read_state(bad_entry); }), "/matrix/1/1");

  const json not_psd = io::parse(R"({"schema":"povmc/1","type":"state","matrix":[[[2,0],[0,0]],[[0,0],[-1,0]]]})");
  EXPECT_EQ(pointer_of([&] { io::read_state(not_psd); }), "/matrix");

  const json wrong_schema = io::parse(R"({"schema":"other/1","type":"state"})");
  EXPECT_EQ(pointer_of([&] { io::document_type(wrong_schema); }), "/schema");

  const json missing = io::parse(R"({"schema":"povmc/1","type":"state"})");
  EXPECT_EQ(pointer_of([&] { io::read_state(missing); }), "/matrix");

  const json wrong_type = io::parse(R"({"schema":"povmc/1","type":"choi"})");
  EXPECT_EQ(pointer_of([&] { io::read_state(wrong_type); }), "/type");
}

TEST(Serialize, MalformedJsonReportsRoot) {
  try {
    io::parse(R"({"a": [1, 2)");
    FAIL() << "no error";
  } catch (const io::SchemaError& e) {
    EXPECT_EQ(e.pointer(), "");
    EXPECT_NE(std::string(e.what()).find("\"\": "), std::string::npos);
  }
}

TEST(Serialize, FixtureErrorsPointAtNode) {
  const std::string dir = POVMC_FIXTURES;
  EXPECT_EQ(pointer_of([&] { io::read_measurement_set(io::read_file(dir + "/malformed_povm.json")); }),
            "/povms/0/1");
  EXPECT_EQ(pointer_of([&] { io::read_file(dir + "/malformed_syntax.json"); }), "");
}

TEST(Serialize, SdpDumpSchema) {
  SdpProblem p;
  const int b = p.add_block("X", 2);
  p.add_constraint({{b, Matrix::Identity(2, 2)}}, 1);
  const auto s = solve(p);
  const json d = io::sdp_dump(p, &s);
  EXPECT_EQ(d.at("schema"), io::kSdpSchema);
  EXPECT_EQ(d.at("blocks").size(), 1u);
}
