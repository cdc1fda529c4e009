#include "povmc/compress.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "povmc/errors.hpp"

namespace povmc {

AssemblageData PreparationModel::reconstruct() const {
  AssemblageData out;
  for (const auto& m : members) {
    const Matrix rho = outer(m.state, m.state);
    auto part = assemblage_data_from(rho, m.shape, m.measurements);
    if (out.empty()) {
      out = part;
      for (auto& row : out)
        for (auto& s : row) s *= m.weight;
      continue;
    }
    for (std::size_t x = 0; x < out.size(); ++x)
      for (std::size_t a = 0; a < out[x].size(); ++a) out[x][a] += m.weight * part[x][a];
  }
  return out;
}

ValidationReport validate_preparation_model(const PreparationModel& m,
                                            double rank_tol) {
  ValidationReport r;
  if (m.members.empty()) {
    r.add("preparation: no members", 0.0);
    return r;
  }
  double wsum = 0.0;
  const auto db = m.members.front().shape.dim_b;
  for (std::size_t l = 0; l < m.members.size(); ++l) {
    const auto& mem = m.members[l];
    const auto name = "member " + std::to_string(l);
    if (mem.weight < 0.0) r.add(name + ": negative weight", mem.weight);
    wsum += mem.weight;
    if (mem.state.size() != mem.shape.total() || mem.shape.dim_b != db) {
      r.add(name + ": state does not match its shape", 0.0);
      continue;
    }
    if (std::abs(mem.state.norm() - 1.0) > kNormTol)
      r.add(name + ": state not normalized", mem.state.norm() - 1.0);
    const int sr = schmidt_rank(mem.state, mem.shape, rank_tol);
    if (sr > m.rank_bound) r.add(name + ": Schmidt rank exceeds the bound", double(sr));
    for (std::size_t x = 0; x < mem.measurements.size(); ++x) {
      const auto& povm = mem.measurements[x];
      if (!povm.empty() && povm.front().rows() != mem.shape.dim_a)
        r.add(name + ": measurement does not act on A", 0.0);
      else
        r.merge(validate_povm(povm), name + " setting " + std::to_string(x) + ": ");
    }
  }
  if (std::abs(wsum - 1.0) > kNormTol) r.add("preparation: weights do not sum to 1", wsum - 1.0);
  return r;
}

MeasurementData eval_simulation(const PointwiseKrausModel& m) {
  const int d = m.dim();
  MeasurementData out;
  for (int x = 0; x < m.settings(); ++x) out.emplace_back(m.outcomes(x), Matrix::Zero(d, d));
  for (const auto& b : m.branches())
    for (int x = 0; x < m.settings(); ++x)
      for (int a = 0; a < m.outcomes(x); ++a)
        out[x][a] += b.weight * b.kraus.adjoint() * b.measurements[x][a] * b.kraus;
  for (auto& row : out)
    for (auto& e : row) e = hermitian_part(e);
  return out;
}

PointwiseKrausModel one_sim_from_jm(const ParentModel& pm) {
  const int d = static_cast<int>(pm.parent.front().rows());
  StrategySpace space(pm.outcomes);
  Matrix total = Matrix::Zero(d, d);
  std::vector<Matrix> g;
  for (const auto& gl : pm.parent) {
    g.push_back(psd_projection(gl));
    total += g.back();
  }
  const Matrix fix = inv_sqrt_full_rank(hermitian_part(total));
  std::vector<PointwiseKrausModel::Branch> branches;
  for (int l = 0; l < space.count(); ++l) {
    const Matrix gl = hermitian_part(fix * g[l] * fix);
    auto eig = hermitian_eig(gl);
    MeasurementData resp;
    for (int x = 0; x < space.settings(); ++x) {
      EffectList row(space.outcomes()[x], Matrix::Zero(1, 1));
      row[space.outcome(l, x)](0, 0) = 1.0;
      resp.push_back(std::move(row));
    }
    for (int j = 0; j < d; ++j) {
      if (eig.values(j) <= 0.0) continue;
      PointwiseKrausModel::Branch b;
      b.weight = eig.values(j) / d;
      b.kraus = std::sqrt(double(d)) * eig.vectors.col(j).adjoint();
      b.measurements = resp;
      branches.push_back(std::move(b));
    }
  }
  double wsum = 0.0;
  for (const auto& b : branches) wsum += b.weight;
  for (auto& b : branches) b.weight /= wsum;
  return PointwiseKrausModel(std::move(branches), 1);
}

MeasurementData ResponseParent::reconstruct() const {
  const auto d = parent.front().rows();
  MeasurementData out;
  for (const auto& row : response.front()) out.emplace_back(row.size(), Matrix::Zero(d, d));
  for (std::size_t l = 0; l < parent.size(); ++l)
    for (std::size_t x = 0; x < out.size(); ++x)
      for (std::size_t a = 0; a < out[x].size(); ++a) out[x][a] += response[l][x][a] * parent[l];
  return out;
}

ParentModel ResponseParent::deterministic(int strategy_cap) const {
  ParentModel pm;
  for (const auto& row : response.front()) pm.outcomes.push_back(static_cast<int>(row.size()));
  StrategySpace space(pm.outcomes);
  if (space.count() < 0 || space.count() > strategy_cap)
    throw RefusalError("deterministic parent: strategy count exceeds the cap");
  const auto d = parent.front().rows();
  pm.parent.assign(space.count(), Matrix::Zero(d, d));
  for (int s = 0; s < space.count(); ++s)
    for (std::size_t l = 0; l < parent.size(); ++l) {
      double w = 1.0;
      for (int x = 0; x < space.settings(); ++x) w *= response[l][x][space.outcome(s, x)];
      if (w != 0.0) pm.parent[s] += w * parent[l];
    }
  return pm;
}

ResponseParent jm_from_one_sim(const PointwiseKrausModel& m, double rank_tol) {
  ResponseParent out;
  for (int l = 0; l < m.size(); ++l) {
    const auto& b = m.branch(l);
    if (b.weight <= 0.0) continue;
    Eigen::JacobiSVD<Matrix> svd(b.kraus, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s.size() > 1 && s(1) > rank_tol * s(0)) {
      std::ostringstream os;
      os << "jm_from_one_sim: branch " << l << " has Kraus rank above 1";
      throw ValidationError(os.str());
    }
    const Vector u = svd.matrixU().col(0), v = svd.matrixV().col(0);
    out.parent.push_back(b.weight * s(0) * s(0) * outer(v, v));
    std::vector<std::vector<double>> resp;
    for (const auto& povm : b.measurements) {
      std::vector<double> p;
      for (const auto& e : povm) p.push_back((u.adjoint() * e * u)(0).real());
      resp.push_back(std::move(p));
    }
    out.response.push_back(std::move(resp));
  }
  return out;
}

PointwiseKrausModel prep_to_sim(const PreparationModel& pm, const DensityState& sigma,
                                double rank_tol) {
  const auto report = validate_preparation_model(pm, rank_tol);
  if (!report.ok()) throw ValidationError("prep_to_sim: " + report.summary());
  const Matrix inv = inv_sqrt_full_rank(sigma.matrix(), rank_tol);
  // The preparation must have total sigma.
  Matrix total = Matrix::Zero(sigma.dim(), sigma.dim());
  for (const auto& m : pm.members)
    total += m.weight * partial_trace(outer(m.state, m.state), m.shape, Side::A);
  const double err = (total - sigma.matrix()).cwiseAbs().maxCoeff();
  if (err > 1e-7) {
    std::ostringstream os;
    os << "prep_to_sim: preparation total differs from sigma by " << err;
    throw ValidationError(os.str());
  }

  std::vector<PointwiseKrausModel::Branch> branches;
  for (const auto& m : pm.members) {
    if (m.weight <= 0.0) continue;
    auto sd = schmidt_decompose(m.state, m.shape);
    int r = 0;
    for (Eigen::Index i = 0; i < sd.coefficients.size(); ++i)
      if (sd.coefficients(i) > rank_tol * sd.coefficients(0)) ++r;
    const Matrix phi = sd.left.leftCols(r);
    const Matrix psi = sd.right.leftCols(r);
    PointwiseKrausModel::Branch b;
    b.weight = m.weight;
    b.kraus = sd.coefficients.head(r).cast<cplx>().asDiagonal() * psi.adjoint() * inv;
    for (const auto& povm : m.measurements) {
      EffectList row;
      for (const auto& e : povm) row.push_back(hermitian_part((phi.adjoint() * e * phi).transpose()));
      b.measurements.push_back(std::move(row));
    }
    b.basis = phi;
    branches.push_back(std::move(b));
  }
  // Absorb the residual normalization error of the input into the Kraus
  // operators so that sum mu K^*K = I holds to working precision.
  Matrix tp = Matrix::Zero(sigma.dim(), sigma.dim());
  for (const auto& b : branches) tp += b.weight * b.kraus.adjoint() * b.kraus;
  const Matrix fix = inv_sqrt_full_rank(hermitian_part(tp));
  for (auto& b : branches) b.kraus = b.kraus * fix;
  return PointwiseKrausModel(std::move(branches), pm.rank_bound, rank_tol);
}

PreparationModel sim_to_prep(const PointwiseKrausModel& m, const DensityState& sigma) {
  inv_sqrt_full_rank(sigma.matrix());
  const Matrix root = matrix_sqrt(sigma.matrix());
  PreparationModel out;
  out.rank_bound = m.rank_bound();
  for (const auto& b : m.branches()) {
    const Matrix f = b.kraus * root;
    const double nrm = f.norm();
    // Zero-norm branches carry no weight; the rest are renormalized below.
    if (nrm == 0.0 || b.weight * nrm * nrm <= 1e-300) continue;
    const double w = b.weight * nrm * nrm;
    PreparationModel::Member mem;
    mem.weight = w;
    mem.shape = {static_cast<int>(f.rows()), static_cast<int>(f.cols())};
    mem.state = op_to_vec(f.conjugate()) / nrm;
    for (const auto& povm : b.measurements) {
      EffectList row;
      for (const auto& e : povm) row.push_back(e.transpose());
      mem.measurements.push_back(std::move(row));
    }
    out.members.push_back(std::move(mem));
  }
  double wsum = 0.0;
  for (const auto& mem : out.members) wsum += mem.weight;
  for (auto& mem : out.members) mem.weight /= wsum;
  return out;
}

Matrix WeightedKraus::heisenberg(const Matrix& a) const {
  Matrix out = Matrix::Zero(kraus.front().cols(), kraus.front().cols());
  for (std::size_t i = 0; i < kraus.size(); ++i)
    out += weights[i] * kraus[i].adjoint() * a * kraus[i];
  return out;
}

Matrix WeightedKraus::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (std::size_t i = 0; i < kraus.size(); ++i)
    out += weights[i] * kraus[i] * rho * kraus[i].adjoint();
  return out;
}

int WeightedKraus::max_rank(double rank_tol) const {
  int r = 0;
  for (const auto& k : kraus) r = std::max(r, numerical_rank(k, rank_tol));
  return r;
}

KrausChannel WeightedKraus::channel() const {
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < kraus.size(); ++i) ops.push_back(std::sqrt(weights[i]) * kraus[i]);
  return KrausChannel(std::move(ops));
}

WeightedKraus peb_kraus_extraction(const PureDecomposition& dec, const DensityState& sigma) {
  if (dec.shape.dim_b != sigma.dim())
    throw DimensionError("peb_kraus_extraction: decomposition input factor differs from sigma");
  const Matrix inv = inv_sqrt_full_rank(sigma.matrix());
  const Matrix marg = partial_trace(dec.reconstruct(), dec.shape, Side::A);
  const double err = (marg - sigma.matrix().transpose()).cwiseAbs().maxCoeff();
  if (err > 1e-7) {
    std::ostringstream os;
    os << "peb_kraus_extraction: input marginal differs from sigma^T by " << err;
    throw ValidationError(os.str());
  }
  WeightedKraus out;
  for (std::size_t i = 0; i < dec.weights.size(); ++i) {
    if (dec.weights[i] <= 0.0) continue;
    out.weights.push_back(dec.weights[i]);
    out.kraus.push_back(vec_to_op(dec.vectors[i], dec.shape) * inv);
  }
  return out;
}

PureDecomposition kraus_to_choi_sn_witness(const KrausChannel& c,
                                           const std::optional<DensityState>& sigma) {
  const int din = c.d_in();
  const Matrix s = sigma ? sigma->matrix() : Matrix(Matrix::Identity(din, din) / double(din));
  if (s.rows() != din) throw DimensionError("kraus_to_choi_sn_witness: sigma dimension");
  const Matrix root = matrix_sqrt(s);
  PureDecomposition out;
  out.shape = {c.d_out(), din};
  for (const auto& k : c.ops()) {
    const Vector v = op_to_vec(k * root);
    const double q = v.squaredNorm();
    if (q == 0.0) continue;
    out.weights.push_back(q);
    out.vectors.push_back(v / std::sqrt(q));
  }
  return out;
}

}  // namespace povmc
