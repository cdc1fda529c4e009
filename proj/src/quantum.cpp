#include "povmc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "povmc/errors.hpp"

namespace povmc {

namespace {

void check_square(ValidationReport& r, const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    r.add(what + ": not a nonempty square matrix", double(m.rows() - m.cols()));
}

// Hermiticity and PSD checks on one operator.
void check_psd(ValidationReport& r, const Matrix& m, const std::string& what) {
  const double herm = hermiticity_defect(m);
  if (herm > kHermTol) {
    r.add(what + ": not Hermitian", herm);
    return;
  }
  const double lmin = min_eigenvalue(m);
  if (lmin < -kPsdTol) r.add(what + ": not positive semidefinite", -lmin);
}

double identity_defect(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

std::string indexed(const char* what, int i) {
  return std::string(what) + "[" + std::to_string(i) + "]";
}

void throw_if_bad(const ValidationReport& r, const char* type) {
  if (!r.ok()) throw ValidationError(std::string(type) + ": " + r.summary());
}

}  // namespace

void ValidationReport::merge(const ValidationReport& other,
                             const std::string& prefix) {
  for (const auto& v : other.violations)
    violations.push_back({prefix + v.what, v.magnitude});
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].what << " (" << violations[i].magnitude << ")";
  }
  return os.str();
}

ValidationReport validate_state(const Matrix& rho) {
  ValidationReport r;
  check_square(r, rho, "state");
  if (!r.ok()) return r;
  check_psd(r, rho, "state");
  const double tr_err = std::abs(rho.trace() - cplx(1.0));
  if (tr_err > kTraceTol) r.add("state: trace differs from 1", tr_err);
  return r;
}

ValidationReport validate_povm(const EffectList& effects) {
  ValidationReport r;
  if (effects.empty()) {
    r.add("povm: no effects", 0.0);
    return r;
  }
  const Eigen::Index d = effects.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t a = 0; a < effects.size(); ++a) {
    const auto name = indexed("effect", int(a));
    check_square(r, effects[a], name);
    if (effects[a].rows() != d) {
      r.add(name + ": dimension mismatch", double(effects[a].rows() - d));
      continue;
    }
    if (!r.ok()) continue;
    check_psd(r, effects[a], name);
    sum += effects[a];
  }
  if (!r.ok()) return r;
  const double norm_err = identity_defect(sum);
  if (norm_err > kNormTol)
    r.add("povm: effects do not sum to the identity", norm_err);
  return r;
}

ValidationReport validate_measurement_set(const MeasurementData& povms) {
  ValidationReport r;
  if (povms.empty()) {
    r.add("measurement set: no settings", 0.0);
    return r;
  }
  for (std::size_t x = 0; x < povms.size(); ++x)
    r.merge(validate_povm(povms[x]), indexed("setting", int(x)) + ": ");
  if (!r.ok()) return r;
  const auto d = povms.front().front().rows();
  for (std::size_t x = 0; x < povms.size(); ++x)
    if (povms[x].front().rows() != d)
      r.add(indexed("setting", int(x)) + ": dimension differs from setting 0",
            double(povms[x].front().rows() - d));
  return r;
}

ValidationReport validate_assemblage(const AssemblageData& members) {
  ValidationReport r;
  if (members.empty() || members.front().empty()) {
    r.add("assemblage: no members", 0.0);
    return r;
  }
  const Eigen::Index d = members.front().front().rows();
  Matrix total;
  for (std::size_t x = 0; x < members.size(); ++x) {
    if (members[x].empty()) {
      r.add(indexed("setting", int(x)) + ": no outcomes", 0.0);
      continue;
    }
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t a = 0; a < members[x].size(); ++a) {
      const auto name = indexed("setting", int(x)) + indexed(" member", int(a));
      const Matrix& m = members[x][a];
      check_square(r, m, name);
      if (m.rows() != d) {
        r.add(name + ": dimension mismatch", double(m.rows() - d));
        continue;
      }
      if (!r.ok()) continue;
      check_psd(r, m, name);
      sum += m;
    }
    if (!r.ok()) continue;
    if (x == 0) {
      total = sum;
    } else {
      const double ns = (sum - total).cwiseAbs().maxCoeff();
      if (ns > kNormTol)
        r.add(indexed("setting", int(x)) +
                  ": marginal differs from setting 0 (signalling)",
              ns);
    }
  }
  if (r.ok()) r.merge(validate_state(total), "assemblage total: ");
  return r;
}

ValidationReport validate_kraus(const std::vector<Matrix>& ops) {
  ValidationReport r;
  if (ops.empty()) {
    r.add("kraus: no operators", 0.0);
    return r;
  }
  const auto din = ops.front().cols(), dout = ops.front().rows();
  Matrix sum = Matrix::Zero(din, din);
  for (std::size_t k = 0; k < ops.size(); ++k) {
    if (ops[k].cols() != din || ops[k].rows() != dout) {
      r.add(indexed("kraus", int(k)) + ": shape mismatch", 0.0);
      continue;
    }
    sum += ops[k].adjoint() * ops[k];
  }
  if (!r.ok()) return r;
  const double tp = identity_defect(sum);
  if (tp > kNormTol) r.add("kraus: not trace preserving", tp);
  return r;
}

ValidationReport validate_choi(const Matrix& j, const BipartiteShape& shape) {
  ValidationReport r;
  if (j.rows() != shape.total() || j.cols() != shape.total()) {
    r.add("choi: matrix does not match the (out, in) shape",
          double(j.rows() - shape.total()));
    return r;
  }
  check_psd(r, j, "choi");
  if (!r.ok()) return r;
  Matrix marg = partial_trace(j, shape, Side::A) * double(shape.dim_b);
  const double err = identity_defect(marg) / double(shape.dim_b);
  if (err > kNormTol) r.add("choi: input marginal differs from I/d_in", err);
  return r;
}

ValidationReport validate_instrument(
    const std::vector<std::vector<Matrix>>& branches) {
  ValidationReport r;
  std::vector<Matrix> all;
  for (const auto& b : branches)
    for (const auto& k : b) all.push_back(k);
  if (all.empty()) {
    r.add("instrument: no operators", 0.0);
    return r;
  }
  const auto din = all.front().cols();
  Matrix sum = Matrix::Zero(din, din);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].cols() != din) {
      r.add("instrument: input dimension mismatch", 0.0);
      return r;
    }
    sum += all[i].adjoint() * all[i];
  }
  const double tp = identity_defect(sum);
  if (tp > kNormTol) r.add("instrument: sum of branches not trace preserving", tp);
  return r;
}

// --- types --------------------------------------------------------------

DensityState::DensityState(Matrix rho) : rho_(std::move(rho)) {
  throw_if_bad(validate_state(rho_), "DensityState");
}

DensityState DensityState::maximally_mixed(int d) {
  return DensityState(Matrix::Identity(d, d) / double(d));
}

Povm::Povm(EffectList effects) : effects_(std::move(effects)) {
  throw_if_bad(validate_povm(effects_), "Povm");
}

MeasurementSet::MeasurementSet(std::vector<Povm> povms)
    : povms_(std::move(povms)) {
  if (povms_.empty()) throw ValidationError("MeasurementSet: no settings");
  for (const auto& p : povms_)
    if (p.dim() != povms_.front().dim())
      throw ValidationError("MeasurementSet: settings act on different dimensions");
}

MeasurementSet::MeasurementSet(const MeasurementData& data) {
  throw_if_bad(validate_measurement_set(data), "MeasurementSet");
  for (const auto& p : data) povms_.emplace_back(p);
}

MeasurementData MeasurementSet::data() const {
  MeasurementData out;
  for (const auto& p : povms_) out.push_back(p.effects());
  return out;
}

namespace {
Matrix first_setting_sum(const AssemblageData& members) {
  throw_if_bad(validate_assemblage(members), "Assemblage");
  Matrix total = Matrix::Zero(members.front().front().rows(),
                              members.front().front().cols());
  for (const auto& m : members.front()) total += m;
  return hermitian_part(total);
}
}  // namespace

Assemblage::Assemblage(AssemblageData members)
    : members_(std::move(members)), total_(first_setting_sum(members_)) {}

KrausChannel::KrausChannel(std::vector<Matrix> ops) : ops_(std::move(ops)) {
  throw_if_bad(validate_kraus(ops_), "KrausChannel");
}

ChoiMatrix::ChoiMatrix(Matrix j, BipartiteShape shape)
    : j_(std::move(j)), shape_(shape) {
  throw_if_bad(validate_choi(j_, shape_), "ChoiMatrix");
}

Instrument::Instrument(std::vector<std::vector<Matrix>> branches)
    : branches_(std::move(branches)) {
  throw_if_bad(validate_instrument(branches_), "Instrument");
}

int Instrument::d_in() const {
  for (const auto& b : branches_)
    if (!b.empty()) return static_cast<int>(b.front().cols());
  return 0;
}

Matrix Instrument::apply(int l, const Matrix& rho) const {
  const auto& b = branches_[l];
  Matrix out = Matrix::Zero(b.front().rows(), b.front().rows());
  for (const auto& k : b) out += k * rho * k.adjoint();
  return out;
}

Matrix Instrument::adjoint(int l, const Matrix& a) const {
  const auto& b = branches_[l];
  Matrix out = Matrix::Zero(b.front().cols(), b.front().cols());
  for (const auto& k : b) out += k.adjoint() * a * k;
  return out;
}

ValidationReport validate_pointwise_model(
    const std::vector<PointwiseKrausModel::Branch>& branches, int rank_bound,
    double rank_tol) {
  ValidationReport r;
  if (branches.empty()) {
    r.add("model: no branches", 0.0);
    return r;
  }
  if (rank_bound < 1) r.add("model: rank bound below 1", double(rank_bound));
  const auto d = branches.front().kraus.cols();
  const auto& ref = branches.front().measurements;
  double wsum = 0.0;
  Matrix tp = Matrix::Zero(d, d);
  for (std::size_t l = 0; l < branches.size(); ++l) {
    const auto& b = branches[l];
    const auto name = indexed("branch", int(l));
    if (!(b.weight >= 0.0)) r.add(name + ": negative weight", b.weight);
    wsum += b.weight;
    if (b.kraus.cols() != d) {
      r.add(name + ": input dimension mismatch", double(b.kraus.cols() - d));
      continue;
    }
    tp += b.weight * b.kraus.adjoint() * b.kraus;
    const int rank = numerical_rank(b.kraus, rank_tol);
    if (rank > rank_bound)
      r.add(name + ": Kraus rank exceeds the bound", double(rank));
    if (b.measurements.size() != ref.size()) {
      r.add(name + ": number of settings differs", 0.0);
      continue;
    }
    for (std::size_t x = 0; x < b.measurements.size(); ++x) {
      const auto& povm = b.measurements[x];
      if (povm.size() != ref[x].size())
        r.add(name + indexed(" setting", int(x)) + ": outcome count differs", 0.0);
      if (!povm.empty() && povm.front().rows() != b.kraus.rows())
        r.add(name + indexed(" setting", int(x)) +
                  ": measurement does not act on the Kraus output space",
              0.0);
      else
        r.merge(validate_povm(povm), name + indexed(" setting", int(x)) + ": ");
    }
  }
  if (std::abs(wsum - 1.0) > kNormTol) r.add("model: weights do not sum to 1", std::abs(wsum - 1.0));
  if (r.ok()) {
    const double err = identity_defect(tp);
    if (err > kNormTol)
      r.add("model: sum mu K^*K differs from the identity", err);
  }
  return r;
}

PointwiseKrausModel::PointwiseKrausModel(std::vector<Branch> branches,
                                         int rank_bound, double rank_tol)
    : branches_(std::move(branches)), rank_bound_(rank_bound) {
  throw_if_bad(validate_pointwise_model(branches_, rank_bound_, rank_tol),
               "PointwiseKrausModel");
}

Instrument PointwiseKrausModel::instrument() const {
  std::vector<std::vector<Matrix>> out;
  for (const auto& b : branches_) out.push_back({std::sqrt(b.weight) * b.kraus});
  return Instrument(std::move(out));
}

Matrix PureDecomposition::reconstruct() const {
  Matrix out = Matrix::Zero(shape.total(), shape.total());
  for (std::size_t i = 0; i < weights.size(); ++i)
    out += weights[i] * outer(vectors[i], vectors[i]);
  return out;
}

// --- conversions --------------------------------------------------------

ChoiMatrix choi_of_channel(const KrausChannel& c) {
  const int din = c.d_in(), dout = c.d_out();
  Matrix j = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : c.ops()) {
    Vector v = op_to_vec(k);
    j += v * v.adjoint();
  }
  j /= double(din);
  return ChoiMatrix(hermitian_part(j), {dout, din});
}

KrausChannel kraus_of_choi(const ChoiMatrix& j, double rank_tol) {
  const auto& shape = j.shape();
  auto eig = hermitian_eig(j.matrix());
  const double cutoff = rank_tol * eig.values(0);
  std::vector<Matrix> ops;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= cutoff) break;
    ops.push_back(std::sqrt(eig.values(k) * shape.dim_b) *
                  vec_to_op(eig.vectors.col(k), shape));
  }
  return KrausChannel(std::move(ops));
}

Matrix apply_channel(const KrausChannel& c, const Matrix& rho) {
  if (rho.rows() != c.d_in())
    throw DimensionError("apply_channel: input dimension mismatch");
  Matrix out = Matrix::Zero(c.d_out(), c.d_out());
  for (const auto& k : c.ops()) out += k * rho * k.adjoint();
  return out;
}

DensityState apply_channel(const KrausChannel& c, const DensityState& rho) {
  return DensityState(hermitian_part(apply_channel(c, rho.matrix())));
}

Matrix heisenberg_apply(const KrausChannel& c, const Matrix& a) {
  if (a.rows() != c.d_out())
    throw DimensionError("heisenberg_apply: output dimension mismatch");
  Matrix out = Matrix::Zero(c.d_in(), c.d_in());
  for (const auto& k : c.ops()) out += k.adjoint() * a * k;
  return out;
}

AssemblageData assemblage_data_from(const Matrix& rho,
                                    const BipartiteShape& shape,
                                    const MeasurementData& ms) {
  if (rho.rows() != shape.total())
    throw DimensionError("assemblage_from: state does not match the shape");
  AssemblageData out;
  for (const auto& povm : ms) {
    EffectList row;
    for (const auto& e : povm) {
      if (e.rows() != shape.dim_a)
        throw DimensionError(
            "assemblage_from: measurement does not act on the A factor");
      Matrix op = kron(e, Matrix::Identity(shape.dim_b, shape.dim_b)) * rho;
      row.push_back(hermitian_part(partial_trace(op, shape, Side::A)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

Assemblage assemblage_from(const DensityState& rho, const BipartiteShape& shape,
                           const MeasurementSet& ms) {
  if (ms.dim() != shape.dim_a)
    throw DimensionError("assemblage_from: measurement does not act on A");
  return Assemblage(assemblage_data_from(rho.matrix(), shape, ms.data()));
}

Assemblage sandwich(const DensityState& sigma, const MeasurementSet& ms,
                    double rank_tol) {
  if (sigma.dim() != ms.dim())
    throw DimensionError("sandwich: state and measurements differ in dimension");
  inv_sqrt_full_rank(sigma.matrix(), rank_tol);  // full-rank check
  const Matrix root = matrix_sqrt(sigma.matrix());
  AssemblageData out;
  for (const auto& p : ms.povms()) {
    EffectList row;
    for (const auto& e : p.effects()) row.push_back(hermitian_part(root * e * root));
    out.push_back(std::move(row));
  }
  return Assemblage(std::move(out));
}

MeasurementSet unsandwich(const Assemblage& asm_, double rank_tol) {
  const Matrix inv = inv_sqrt_full_rank(asm_.total().matrix(), rank_tol);
  MeasurementData out;
  for (const auto& row : asm_.members()) {
    EffectList effects;
    for (const auto& s : row) effects.push_back(hermitian_part(inv * s * inv));
    out.push_back(std::move(effects));
  }
  return MeasurementSet(out);
}

int sn_upper_from_decomposition(const Matrix& rho,
                                const PureDecomposition& decomposition,
                                double rank_tol) {
  if (decomposition.weights.size() != decomposition.vectors.size())
    throw ValidationError("decomposition: weights and vectors differ in count");
  const double err = frob_distance(decomposition.reconstruct(), rho);
  if (err > 1e-8) {
    std::ostringstream os;
    os << "decomposition does not reconstruct the state (error " << err << ")";
    throw ValidationError(os.str());
  }
  int sr = 0;
  for (std::size_t i = 0; i < decomposition.vectors.size(); ++i) {
    if (decomposition.weights[i] <= 0.0) continue;
    sr = std::max(sr, schmidt_rank(decomposition.vectors[i], decomposition.shape,
                                   rank_tol));
  }
  return sr;
}

namespace {

Matrix polar_unitary(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double fraction_of(const Matrix& rho, const Matrix& u) {
  const double d = double(u.rows());
  Vector v = op_to_vec(u);
  return (v.adjoint() * rho * v)(0).real() / d;
}

}  // namespace

EntangledFractionBound sn_lower_entangled_fraction(const Matrix& rho, int d) {
  if (rho.rows() != d * d)
    throw DimensionError("sn_lower_entangled_fraction: state is not on d x d");
  const BipartiteShape shape{d, d};
  std::vector<Matrix> starts{Matrix::Identity(d, d)};
  auto eig = hermitian_eig(rho);
  for (int k = 0; k < std::min<int>(3, int(eig.values.size())); ++k)
    starts.push_back(polar_unitary(vec_to_op(eig.vectors.col(k), shape)));

  EntangledFractionBound best;
  best.fraction = -1.0;
  for (Matrix u : starts) {
    double f = fraction_of(rho, u);
    for (int it = 0; it < 1000; ++it) {
      // f is a convex quadratic in vec(U); the polar factor of the gradient
      // never decreases it.
      Matrix next = polar_unitary(vec_to_op(rho * op_to_vec(u), shape));
      const double fn = fraction_of(rho, next);
      u = next;
      const bool done = fn - f < 1e-15;
      f = std::max(f, fn);
      if (done) break;
    }
    if (f > best.fraction) {
      best.fraction = f;
      best.unitary = u;
    }
  }
  best.bound = std::clamp(int(std::ceil(d * best.fraction - 1e-9)), 1, d);
  return best;
}

double max_deviation(const std::vector<EffectList>& a,
                     const std::vector<EffectList>& b) {
  if (a.size() != b.size()) return INFINITY;
  double out = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (a[x].size() != b[x].size()) return INFINITY;
    for (std::size_t k = 0; k < a[x].size(); ++k) {
      if (a[x][k].rows() != b[x][k].rows() || a[x][k].cols() != b[x][k].cols())
        return INFINITY;
      out = std::max(out, (a[x][k] - b[x][k]).norm());
    }
  }
  return out;
}

}  // namespace povmc
