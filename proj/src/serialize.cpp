#include "povmc/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace povmc::io {

namespace {

std::string at(const std::string& ptr, const std::string& key) {
  std::string k;
  for (char c : key) {
    if (c == '~') k += "~0";
    else if (c == '/') k += "~1";
    else k += c;
  }
  return ptr + "/" + k;
}
std::string at(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& field(const json& j, const std::string& ptr, const std::string& key) {
  if (!j.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(at(ptr, key), "missing required field");
  return *it;
}

const json& array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  return j;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return j.get<int>();
}

std::vector<double> reals(const json& j, const std::string& ptr) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(number(j[i], at(ptr, i)));
  return out;
}

std::vector<int> ints(const json& j, const std::string& ptr) {
  std::vector<int> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(integer(j[i], at(ptr, i)));
  return out;
}

BipartiteShape shape_of(const json& j, const std::string& ptr) {
  const auto v = ints(j, ptr);
  if (v.size() != 2 || v[0] < 1 || v[1] < 1)
    throw SchemaError(ptr, "expected [dim_a, dim_b] with positive entries");
  return {v[0], v[1]};
}

json encode_shape(const BipartiteShape& s) { return json::array({s.dim_a, s.dim_b}); }

using Table = std::vector<std::vector<std::vector<double>>>;

Table table_of(const json& j, const std::string& ptr) {
  Table out;
  for (std::size_t l = 0; l < array(j, ptr).size(); ++l) {
    const auto pl = at(ptr, l);
    std::vector<std::vector<double>> row;
    for (std::size_t x = 0; x < array(j[l], pl).size(); ++x) row.push_back(reals(j[l][x], at(pl, x)));
    out.push_back(std::move(row));
  }
  return out;
}

json header(const char* type) { return json{{"schema", kSchema}, {"type", type}}; }

void expect(const json& doc, const std::string& type) {
  const auto t = document_type(doc);
  if (t != type) throw SchemaError("/type", "expected \"" + type + "\", got \"" + t + "\"");
}

// Runs a validating constructor and reports its failure at the payload.
template <class F>
auto build(const std::string& ptr, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(ptr, e.what());
  }
}

}  // namespace

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", "malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json encode(cplx z) { return json::array({z.real(), z.imag()}); }

json encode(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(encode(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json encode(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(encode(v(i)));
  return out;
}

json encode(const std::vector<Matrix>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(encode(m));
  return out;
}

json encode(const std::vector<EffectList>& ms) {
  json out = json::array();
  for (const auto& m : ms) out.push_back(encode(m));
  return out;
}

cplx decode_complex(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw SchemaError(ptr, "expected a complex scalar [re, im]");
  return {number(j[0], at(ptr, 0)), number(j[1], at(ptr, 1))};
}

Matrix decode_matrix(const json& j, const std::string& ptr) {
  array(j, ptr);
  if (j.empty()) throw SchemaError(ptr, "expected a nonempty matrix");
  const std::size_t cols = array(j[0], at(ptr, 0)).size();
  if (cols == 0) throw SchemaError(at(ptr, 0), "expected a nonempty row");
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto pi = at(ptr, i);
    if (array(j[i], pi).size() != cols) throw SchemaError(pi, "ragged matrix row");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = decode_complex(j[i][k], at(pi, k));
  }
  return m;
}

Vector decode_vector(const json& j, const std::string& ptr) {
  array(j, ptr);
  if (j.empty()) throw SchemaError(ptr, "expected a nonempty vector");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = decode_complex(j[i], at(ptr, i));
  return v;
}

std::vector<Matrix> decode_matrix_list(const json& j, const std::string& ptr) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(decode_matrix(j[i], at(ptr, i)));
  return out;
}

std::vector<EffectList> decode_family(const json& j, const std::string& ptr) {
  std::vector<EffectList> out;
  for (std::size_t i = 0; i < array(j, ptr).size(); ++i) out.push_back(decode_matrix_list(j[i], at(ptr, i)));
  return out;
}

std::string document_type(const json& doc) {
  const auto& s = field(doc, "", "schema");
  if (!s.is_string() || s.get<std::string>() != kSchema)
    throw SchemaError("/schema", std::string("expected \"") + kSchema + "\"");
  const auto& t = field(doc, "", "type");
  if (!t.is_string()) throw SchemaError("/type", "expected a string");
  return t.get<std::string>();
}

// --- writers ------------------------------------------------------------

json to_document(const DensityState& s) {
  auto d = header("state");
  d["matrix"] = encode(s.matrix());
  return d;
}

json to_document(const MeasurementSet& ms) {
  auto d = header("measurement_set");
  d["povms"] = encode(ms.data());
  return d;
}

json to_document(const Assemblage& a) {
  auto d = header("assemblage");
  d["members"] = encode(a.members());
  return d;
}

json to_document(const KrausChannel& c) {
  auto d = header("kraus_channel");
  d["kraus"] = encode(c.ops());
  return d;
}

json to_document(const ChoiMatrix& j) {
  auto d = header("choi");
  d["shape"] = encode_shape(j.shape());
  d["matrix"] = encode(j.matrix());
  return d;
}

json to_document(const Instrument& i) {
  auto d = header("instrument");
  d["branches"] = encode(i.all());
  return d;
}

json to_document(const PointwiseKrausModel& m) {
  auto d = header("pointwise_kraus_model");
  d["rank_bound"] = m.rank_bound();
  json branches = json::array();
  for (const auto& b : m.branches()) {
    json jb{{"weight", b.weight}, {"kraus", encode(b.kraus)}, {"measurements", encode(b.measurements)}};
    if (b.basis) jb["basis"] = encode(*b.basis);
    branches.push_back(std::move(jb));
  }
  d["branches"] = std::move(branches);
  return d;
}

json to_document(const PureDecomposition& p) {
  auto d = header("pure_decomposition");
  d["shape"] = encode_shape(p.shape);
  d["weights"] = p.weights;
  json vs = json::array();
  for (const auto& v : p.vectors) vs.push_back(encode(v));
  d["vectors"] = std::move(vs);
  return d;
}

json to_document(const ParentModel& p) {
  auto d = header("parent_model");
  d["outcomes"] = p.outcomes;
  d["parent"] = encode(p.parent);
  return d;
}

json to_document(const Witness& w) {
  auto d = header("witness");
  d["operators"] = encode(w.operators);
  d["value"] = w.value;
  d["repair"] = w.repair;
  return d;
}

json to_document(const LhsModel& m) {
  auto d = header("lhs_model");
  d["hidden_states"] = encode(m.hidden_states);
  d["response"] = m.response;
  return d;
}

json to_document(const SeparablePreparation& p) {
  auto d = header("separable_preparation");
  d["shape"] = encode_shape(p.ensemble.shape);
  d["weights"] = p.ensemble.weights;
  d["alpha"] = encode(p.ensemble.alpha);
  d["beta"] = encode(p.ensemble.beta);
  d["measurements"] = encode(p.measurements);
  return d;
}

json to_document(const PreparationModel& m) {
  auto d = header("preparation_model");
  d["rank_bound"] = m.rank_bound;
  json members = json::array();
  for (const auto& mb : m.members)
    members.push_back(json{{"weight", mb.weight},
                           {"state", encode(mb.state)},
                           {"shape", encode_shape(mb.shape)},
                           {"measurements", encode(mb.measurements)}});
  d["members"] = std::move(members);
  return d;
}

json to_document(const ResponseParent& p) {
  auto d = header("response_parent");
  d["parent"] = encode(p.parent);
  d["response"] = p.response;
  return d;
}

json to_document(const WeightedKraus& w) {
  auto d = header("weighted_kraus");
  d["weights"] = w.weights;
  d["kraus"] = encode(w.kraus);
  return d;
}

json to_document(const std::vector<ScanRow>& rows) {
  auto d = header("cv_scan");
  json rs = json::array();
  for (const auto& r : rows)
    rs.push_back(json{{"d", r.d},
                      {"bins", r.bins},
                      {"eta_star", r.eta_star},
                      {"eta_certified", r.eta_certified},
                      {"seesaw_n", r.seesaw_n},
                      {"visibility", r.visibility},
                      {"cert_status", r.cert_status}});
  d["rows"] = std::move(rs);
  return d;
}

json encode(const RobustnessResult& r) {
  json j{{"eta", r.eta}, {"lo", r.lo}, {"hi", r.hi}, {"certified", r.certified}, {"solves", r.solves}};
  if (r.witness) j["witness"] = to_document(*r.witness);
  return j;
}

json encode(const CertificateReport& c) {
  return json{{"ok", c.ok},
              {"breaches", c.breaches},
              {"primal_residual", c.primal_residual},
              {"dual_residual", c.dual_residual},
              {"min_eigenvalue", c.min_eigenvalue},
              {"gap", c.gap},
              {"margin", c.margin}};
}

// --- readers ------------------------------------------------------------

DensityState read_state(const json& doc) {
  expect(doc, "state");
  auto m = decode_matrix(field(doc, "", "matrix"), "/matrix");
  return build("/matrix", [&] { return DensityState(m); });
}

MeasurementSet read_measurement_set(const json& doc) {
  expect(doc, "measurement_set");
  auto f = decode_family(field(doc, "", "povms"), "/povms");
  if (f.empty()) throw SchemaError("/povms", "expected at least one POVM");
  return build("/povms", [&] { return MeasurementSet(f); });
}

Assemblage read_assemblage(const json& doc) {
  expect(doc, "assemblage");
  auto f = decode_family(field(doc, "", "members"), "/members");
  if (f.empty()) throw SchemaError("/members", "expected at least one setting");
  return build("/members", [&] { return Assemblage(f); });
}

KrausChannel read_kraus_channel(const json& doc) {
  expect(doc, "kraus_channel");
  auto k = decode_matrix_list(field(doc, "", "kraus"), "/kraus");
  if (k.empty()) throw SchemaError("/kraus", "expected at least one operator");
  return build("/kraus", [&] { return KrausChannel(k); });
}

ChoiMatrix read_choi(const json& doc) {
  expect(doc, "choi");
  const auto s = shape_of(field(doc, "", "shape"), "/shape");
  auto m = decode_matrix(field(doc, "", "matrix"), "/matrix");
  return build("/matrix", [&] { return ChoiMatrix(m, s); });
}

Instrument read_instrument(const json& doc) {
  expect(doc, "instrument");
  auto b = decode_family(field(doc, "", "branches"), "/branches");
  if (b.empty()) throw SchemaError("/branches", "expected at least one branch");
  return build("/branches", [&] { return Instrument(b); });
}

PointwiseKrausModel read_pointwise_model(const json& doc) {
  expect(doc, "pointwise_kraus_model");
  const int rank = integer(field(doc, "", "rank_bound"), "/rank_bound");
  const auto& jb = array(field(doc, "", "branches"), "/branches");
  if (jb.empty()) throw SchemaError("/branches", "expected at least one branch");
  std::vector<PointwiseKrausModel::Branch> branches;
  for (std::size_t l = 0; l < jb.size(); ++l) {
    const auto p = at("/branches", l);
    PointwiseKrausModel::Branch b;
    b.weight = number(field(jb[l], p, "weight"), at(p, "weight"));
    b.kraus = decode_matrix(field(jb[l], p, "kraus"), at(p, "kraus"));
    b.measurements = decode_family(field(jb[l], p, "measurements"), at(p, "measurements"));
    if (jb[l].contains("basis")) b.basis = decode_matrix(jb[l]["basis"], at(p, "basis"));
    branches.push_back(std::move(b));
  }
  return build("/branches", [&] { return PointwiseKrausModel(branches, rank); });
}

PureDecomposition read_pure_decomposition(const json& doc) {
  expect(doc, "pure_decomposition");
  PureDecomposition d;
  d.shape = shape_of(field(doc, "", "shape"), "/shape");
  d.weights = reals(field(doc, "", "weights"), "/weights");
  const auto& jv = array(field(doc, "", "vectors"), "/vectors");
  if (jv.size() != d.weights.size()) throw SchemaError("/vectors", "length differs from /weights");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const auto p = at("/vectors", i);
    d.vectors.push_back(decode_vector(jv[i], p));
    if (d.vectors.back().size() != d.shape.dim_a * d.shape.dim_b)
      throw SchemaError(p, "length does not match /shape");
    if (d.weights[i] < 0) throw SchemaError(at("/weights", i), "negative weight");
  }
  return d;
}

ParentModel read_parent_model(const json& doc) {
  expect(doc, "parent_model");
  ParentModel p;
  p.outcomes = ints(field(doc, "", "outcomes"), "/outcomes");
  p.parent = decode_matrix_list(field(doc, "", "parent"), "/parent");
  for (int o : p.outcomes)
    if (o < 1) throw SchemaError("/outcomes", "outcome counts must be positive");
  long long count = 1;
  for (int o : p.outcomes) count *= o;
  if (static_cast<long long>(p.parent.size()) != count)
    throw SchemaError("/parent", "expected one effect per deterministic strategy");
  return p;
}

Witness read_witness(const json& doc) {
  expect(doc, "witness");
  Witness w;
  w.operators = decode_family(field(doc, "", "operators"), "/operators");
  w.value = number(field(doc, "", "value"), "/value");
  w.repair = doc.contains("repair") ? number(doc["repair"], "/repair") : 0.0;
  return w;
}

LhsModel read_lhs_model(const json& doc) {
  expect(doc, "lhs_model");
  LhsModel m;
  m.hidden_states = decode_matrix_list(field(doc, "", "hidden_states"), "/hidden_states");
  m.response = table_of(field(doc, "", "response"), "/response");
  if (m.hidden_states.empty() || m.response.size() != m.hidden_states.size())
    throw SchemaError("/response", "expected one response table per hidden state");
  const auto rep = validate_lhs_model(m);
  if (!rep.ok()) throw SchemaError("", rep.summary());
  return m;
}

SeparablePreparation read_separable_preparation(const json& doc) {
  expect(doc, "separable_preparation");
  SeparablePreparation p;
  p.ensemble.shape = shape_of(field(doc, "", "shape"), "/shape");
  p.ensemble.weights = reals(field(doc, "", "weights"), "/weights");
  p.ensemble.alpha = decode_matrix_list(field(doc, "", "alpha"), "/alpha");
  p.ensemble.beta = decode_matrix_list(field(doc, "", "beta"), "/beta");
  p.measurements = decode_family(field(doc, "", "measurements"), "/measurements");
  const auto n = p.ensemble.weights.size();
  if (p.ensemble.alpha.size() != n || p.ensemble.beta.size() != n)
    throw SchemaError("/alpha", "alpha, beta and weights must have equal lengths");
  return p;
}

PreparationModel read_preparation_model(const json& doc) {
  expect(doc, "preparation_model");
  PreparationModel m;
  m.rank_bound = integer(field(doc, "", "rank_bound"), "/rank_bound");
  const auto& jm = array(field(doc, "", "members"), "/members");
  for (std::size_t l = 0; l < jm.size(); ++l) {
    const auto p = at("/members", l);
    PreparationModel::Member mb;
    mb.weight = number(field(jm[l], p, "weight"), at(p, "weight"));
    mb.shape = shape_of(field(jm[l], p, "shape"), at(p, "shape"));
    mb.state = decode_vector(field(jm[l], p, "state"), at(p, "state"));
    mb.measurements = decode_family(field(jm[l], p, "measurements"), at(p, "measurements"));
    m.members.push_back(std::move(mb));
  }
  const auto rep = validate_preparation_model(m);
  if (!rep.ok()) throw SchemaError("/members", rep.summary());
  return m;
}

ResponseParent read_response_parent(const json& doc) {
  expect(doc, "response_parent");
  ResponseParent p;
  p.parent = decode_matrix_list(field(doc, "", "parent"), "/parent");
  p.response = table_of(field(doc, "", "response"), "/response");
  if (p.parent.size() != p.response.size())
    throw SchemaError("/response", "expected one response table per parent effect");
  return p;
}

WeightedKraus read_weighted_kraus(const json& doc) {
  expect(doc, "weighted_kraus");
  WeightedKraus w;
  w.weights = reals(field(doc, "", "weights"), "/weights");
  w.kraus = decode_matrix_list(field(doc, "", "kraus"), "/kraus");
  if (w.weights.size() != w.kraus.size()) throw SchemaError("/kraus", "length differs from /weights");
  return w;
}

std::vector<ScanRow> read_scan(const json& doc) {
  expect(doc, "cv_scan");
  std::vector<ScanRow> rows;
  const auto& jr = array(field(doc, "", "rows"), "/rows");
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const auto p = at("/rows", i);
    ScanRow r;
    r.d = integer(field(jr[i], p, "d"), at(p, "d"));
    r.bins = integer(field(jr[i], p, "bins"), at(p, "bins"));
    r.eta_star = number(field(jr[i], p, "eta_star"), at(p, "eta_star"));
    r.eta_certified = field(jr[i], p, "eta_certified").get<bool>();
    r.seesaw_n = integer(field(jr[i], p, "seesaw_n"), at(p, "seesaw_n"));
    r.visibility = number(field(jr[i], p, "visibility"), at(p, "visibility"));
    r.cert_status = field(jr[i], p, "cert_status").get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

ScanOptions read_scan_config(const json& doc) {
  expect(doc, "cv_scan_config");
  ScanOptions o;
  auto get = [&](const char* key, auto& into) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(into);
    } catch (const json::exception& e) {
      throw SchemaError(std::string("/") + key, e.what());
    }
  };
  get("dims", o.dims);
  get("bins", o.bins);
  if (doc.contains("bin_edges")) {
    const auto& je = array(doc.at("bin_edges"), "/bin_edges");
    for (std::size_t i = 0; i < je.size(); ++i) {
      // JSON has no infinities; the outer edges may be written as strings.
      if (je[i] == "-inf") o.bin_edges.push_back(-std::numeric_limits<double>::infinity());
      else if (je[i] == "inf") o.bin_edges.push_back(std::numeric_limits<double>::infinity());
      else o.bin_edges.push_back(number(je[i], at("/bin_edges", i)));
    }
  }
  get("beta", o.beta);
  get("seesaw_ns", o.seesaw_ns);
  get("seesaw_restarts", o.seesaw_restarts);
  get("seesaw_max_rounds", o.seesaw_max_rounds);
  get("resolution", o.resolution);
  std::string sigma = "maximally_mixed";
  get("sigma", sigma);
  if (sigma == "thermal") o.sigma = SigmaChoice::thermal;
  else if (sigma != "maximally_mixed")
    throw SchemaError("/sigma", "expected \"maximally_mixed\" or \"thermal\"");
  for (std::size_t i = 0; i < o.dims.size(); ++i)
    if (o.dims[i] < 1) throw SchemaError(at("/dims", i), "dimension must be positive");
  for (std::size_t i = 0; i < o.seesaw_ns.size(); ++i)
    if (o.seesaw_ns[i] < 1) throw SchemaError(at("/seesaw_ns", i), "n must be positive");
  if (o.bins < 1) throw SchemaError("/bins", "need at least one bin");
  if (o.seesaw_restarts < 1) throw SchemaError("/seesaw_restarts", "must be positive");
  if (!(o.resolution > 0.0)) throw SchemaError("/resolution", "must be positive");
  return o;
}

json to_document(const ScanOptions& o) {
  auto d = header("cv_scan_config");
  d["dims"] = o.dims;
  d["bins"] = o.bins;
  if (!o.bin_edges.empty()) {
    json edges = json::array();
    for (double e : o.bin_edges)
      if (std::isinf(e)) edges.push_back(e < 0 ? "-inf" : "inf");
      else edges.push_back(e);
    d["bin_edges"] = std::move(edges);
  }
  d["sigma"] = o.sigma == SigmaChoice::thermal ? "thermal" : "maximally_mixed";
  d["beta"] = o.beta;
  d["seesaw_ns"] = o.seesaw_ns;
  d["seesaw_restarts"] = o.seesaw_restarts;
  d["seesaw_max_rounds"] = o.seesaw_max_rounds;
  d["resolution"] = o.resolution;
  return d;
}

std::optional<DensityState> read_sigma_field(const json& doc) {
  if (!doc.is_object() || !doc.contains("sigma")) return std::nullopt;
  auto m = decode_matrix(doc["sigma"], "/sigma");
  return build("/sigma", [&] { return DensityState(m); });
}

json sdp_dump(const SdpProblem& p, const SdpSolution* s) {
  json d{{"schema", kSdpSchema}};
  json blocks = json::array();
  for (const auto& b : p.blocks()) blocks.push_back(json{{"label", b.label}, {"dim", b.dim}, {"real", b.real}});
  d["blocks"] = std::move(blocks);
  auto terms = [](const std::vector<SdpTerm>& ts) {
    json out = json::array();
    for (const auto& t : ts) out.push_back(json{{"block", t.block}, {"coeff", encode(t.coeff)}});
    return out;
  };
  json cons = json::array();
  for (const auto& c : p.constraints()) cons.push_back(json{{"rhs", c.rhs}, {"terms", terms(c.terms)}});
  d["constraints"] = std::move(cons);
  if (p.objective()) d["objective"] = terms(*p.objective());
  if (p.trace_bound) d["trace_bound"] = *p.trace_bound;
  if (s) {
    d["solution"] = json{{"status", to_string(s->status)},
                         {"blocks", encode(s->blocks)},
                         {"duals", s->duals},
                         {"primal_residual", s->primal_residual},
                         {"dual_residual", s->dual_residual},
                         {"gap", s->gap},
                         {"primal_objective", s->primal_objective},
                         {"dual_objective", s->dual_objective},
                         {"certified_margin", s->certified_margin},
                         {"iterations", s->iterations},
                         {"message", s->message}};
  }
  return d;
}

}  // namespace povmc::io
