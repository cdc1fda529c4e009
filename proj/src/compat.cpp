#include "povmc/compat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "povmc/errors.hpp"

namespace povmc {

StrategySpace::StrategySpace(std::vector<int> outcomes)
    : outcomes_(std::move(outcomes)) {
  for (int o : outcomes_) {
    if (o < 1) throw ValidationError("StrategySpace: setting with no outcomes");
    stride_.push_back(count_);
    if (count_ > (1 << 30) / o) {
      count_ = -1;  // overflow marker, caught by the cap check
      return;
    }
    count_ *= o;
  }
}

MeasurementData ParentModel::reconstruct() const {
  StrategySpace space(outcomes);
  const auto d = parent.front().rows();
  MeasurementData out;
  for (int x = 0; x < space.settings(); ++x)
    out.emplace_back(outcomes[x], Matrix::Zero(d, d));
  for (int l = 0; l < space.count(); ++l)
    for (int x = 0; x < space.settings(); ++x)
      out[x][space.outcome(l, x)] += parent[l];
  return out;
}

namespace {

std::vector<int> outcome_counts(const MeasurementData& data) {
  std::vector<int> out;
  for (const auto& row : data) out.push_back(static_cast<int>(row.size()));
  return out;
}

StrategySpace checked_space(const MeasurementData& data, int cap) {
  StrategySpace space(outcome_counts(data));
  if (space.count() < 0 || space.count() > cap) {
    std::ostringstream os;
    os << "deterministic strategy count ";
    if (space.count() < 0)
      os << "overflows";
    else
      os << space.count();
    os << " exceeds the cap " << cap;
    throw RefusalError(os.str());
  }
  return space;
}

struct StrategyOutcome {
  bool feasible = false;
  std::vector<Matrix> blocks;
  std::optional<Witness> witness;
  SdpSolution sol;
  CertificateReport cert;
};

// sum_{lambda: lambda(x)=a} X_lambda = targets[x][a], X_lambda >= 0.
StrategyOutcome strategy_sdp(const MeasurementData& targets, double trace_bound,
                             const CompatOptions& opt) {
  const StrategySpace space = checked_space(targets, opt.strategy_cap);
  const int d = static_cast<int>(targets.front().front().rows());
  SdpProblem p;
  for (int l = 0; l < space.count(); ++l) p.add_block("lambda" + std::to_string(l), d);
  std::vector<std::vector<int>> first_row(targets.size());
  for (int x = 0; x < space.settings(); ++x) {
    for (int a = 0; a < space.outcomes()[x]; ++a) {
      std::vector<int> members;
      for (int l = 0; l < space.count(); ++l)
        if (space.outcome(l, x) == a) members.push_back(l);
      first_row[x].push_back(p.add_sum_equality(members, targets[x][a]));
    }
  }
  p.trace_bound = trace_bound;

  StrategyOutcome out;
  out.sol = solve(p, opt.sdp);
  out.cert = verify_certificate(p, out.sol, opt.sdp.tol);
  if (out.sol.status == SdpStatus::optimal) {
    out.feasible = true;
    out.blocks = out.sol.blocks;
    return out;
  }
  if (out.sol.status != SdpStatus::infeasible) return out;

  Witness w;
  for (int x = 0; x < space.settings(); ++x) {
    EffectList row;
    for (int a = 0; a < space.outcomes()[x]; ++a)
      row.push_back(dual_matrix(out.sol.duals, first_row[x][a], d));
    w.operators.push_back(std::move(row));
  }
  // Shift by the identity so that sum_x F_{lambda(x)|x} <= 0 holds exactly.
  double delta = -std::numeric_limits<double>::infinity();
  for (int l = 0; l < space.count(); ++l) {
    Matrix s = Matrix::Zero(d, d);
    for (int x = 0; x < space.settings(); ++x) s += w.operators[x][space.outcome(l, x)];
    delta = std::max(delta, max_eigenvalue(s));
  }
  if (delta > 0.0) {
    const double shift = delta / space.settings();
    for (auto& row : w.operators)
      for (auto& f : row) f -= shift * Matrix::Identity(d, d);
    w.repair = delta;
  }
  for (int x = 0; x < space.settings(); ++x)
    for (int a = 0; a < space.outcomes()[x]; ++a)
      w.value += (w.operators[x][a] * targets[x][a]).trace().real();
  if (w.value > 0.0) out.witness = std::move(w);
  return out;
}

}  // namespace

JmResult jm_test(const MeasurementSet& ms, const CompatOptions& opt) {
  return jm_test(ms.data(), opt);
}

JmResult jm_test(const MeasurementData& data, const CompatOptions& opt) {
  const auto report = validate_measurement_set(data);
  if (!report.ok()) throw ValidationError("jm_test: " + report.summary());
  const double d = double(data.front().front().rows());
  auto res = strategy_sdp(data, d, opt);
  JmResult out;
  out.sdp = std::move(res.sol);
  out.certificate = res.cert;
  if (res.feasible) {
    ParentModel pm;
    pm.outcomes = outcome_counts(data);
    pm.parent = std::move(res.blocks);
    out.parent = std::move(pm);
    out.compatible = true;
  }
  out.witness = std::move(res.witness);
  return out;
}

MeasurementData depolarizing_noise(const MeasurementData& ms, double eta) {
  MeasurementData out = ms;
  for (auto& row : out)
    for (auto& m : row) {
      const auto d = m.rows();
      m = eta * m + (1.0 - eta) * m.trace().real() / double(d) * Matrix::Identity(d, d);
    }
  return out;
}

namespace {

// Common bisection; `test` returns +1 feasible, +2 feasible without a
// verified certificate, -1 certified infeasible (filling the witness),
// 0 inconclusive.
RobustnessResult bisect(const std::function<int(double, std::optional<Witness>&)>& test,
                        double resolution) {
  RobustnessResult r;
  std::optional<Witness> w;
  ++r.solves;
  const int at_one = test(1.0, w);
  if (at_one > 0) {
    r.eta = r.lo = r.hi = 1.0;
    r.certified = at_one == 1;
    return r;
  }
  if (at_one == 0) r.certified = false;
  r.witness = w;
  r.lo = 0.0;
  r.hi = 1.0;
  while (r.hi - r.lo > resolution) {
    const double mid = 0.5 * (r.lo + r.hi);
    std::optional<Witness> wm;
    ++r.solves;
    const int s = test(mid, wm);
    if (s > 0) {
      r.lo = mid;
      if (s == 2) r.certified = false;
    } else {
      r.hi = mid;
      if (s < 0)
        r.witness = wm;
      else
        r.certified = false;
    }
  }
  r.eta = 0.5 * (r.lo + r.hi);
  return r;
}

}  // namespace

RobustnessResult jm_depolarizing_robustness(const MeasurementSet& ms,
                                            const CompatOptions& opt,
                                            const NoiseMap& noise,
                                            double resolution) {
  const MeasurementData data = ms.data();
  checked_space(data, opt.strategy_cap);
  auto test = [&](double eta, std::optional<Witness>& w) {
    auto res = jm_test(noise(data, eta), opt);
    if (res.compatible) return res.certificate.ok ? 1 : 2;
    if (res.witness && res.certificate.ok) {
      w = res.witness;
      return -1;
    }
    return 0;
  };
  return bisect(test, resolution);
}

// --- steering -----------------------------------------------------------

int LhsModel::settings() const {
  return response.empty() ? 0 : static_cast<int>(response.front().size());
}

int LhsModel::outcomes(int x) const {
  return static_cast<int>(response.front()[x].size());
}

AssemblageData LhsModel::reconstruct() const {
  const auto d = hidden_states.front().rows();
  AssemblageData out;
  for (int x = 0; x < settings(); ++x) out.emplace_back(outcomes(x), Matrix::Zero(d, d));
  for (std::size_t l = 0; l < hidden_states.size(); ++l)
    for (int x = 0; x < settings(); ++x)
      for (int a = 0; a < outcomes(x); ++a)
        out[x][a] += response[l][x][a] * hidden_states[l];
  return out;
}

ValidationReport validate_lhs_model(const LhsModel& m) {
  ValidationReport r;
  if (m.hidden_states.empty() || m.hidden_states.size() != m.response.size()) {
    r.add("lhs model: hidden states and responses differ in count", 0.0);
    return r;
  }
  const auto d = m.hidden_states.front().rows();
  const auto& ref = m.response.front();
  for (std::size_t l = 0; l < m.hidden_states.size(); ++l) {
    const auto name = "hidden state " + std::to_string(l);
    const Matrix& t = m.hidden_states[l];
    if (t.rows() != d || t.cols() != d) {
      r.add(name + ": dimension mismatch", 0.0);
      continue;
    }
    if (hermiticity_defect(t) > kHermTol) r.add(name + ": not Hermitian", hermiticity_defect(t));
    else if (min_eigenvalue(t) < -kPsdTol) r.add(name + ": not PSD", -min_eigenvalue(t));
    if (m.response[l].size() != ref.size()) {
      r.add(name + ": response has the wrong number of settings", 0.0);
      continue;
    }
    for (std::size_t x = 0; x < ref.size(); ++x) {
      const auto& p = m.response[l][x];
      if (p.size() != ref[x].size()) {
        r.add(name + ": response outcome count differs", 0.0);
        continue;
      }
      double s = 0.0;
      for (double v : p) {
        if (v < -kNormTol) r.add(name + ": negative response probability", v);
        s += v;
      }
      if (std::abs(s - 1.0) > kNormTol) r.add(name + ": response not normalized", s - 1.0);
    }
  }
  return r;
}

LhsResult lhs_test(const Assemblage& asm_, const CompatOptions& opt) {
  return lhs_test(asm_.members(), opt);
}

LhsResult lhs_test(const AssemblageData& members, const CompatOptions& opt) {
  const auto report = validate_assemblage(members);
  if (!report.ok()) throw ValidationError("lhs_test: " + report.summary());
  double total = 0.0;
  for (const auto& m : members.front()) total += m.trace().real();
  auto res = strategy_sdp(members, total, opt);
  LhsResult out;
  out.sdp = std::move(res.sol);
  out.certificate = res.cert;
  if (res.feasible) {
    StrategySpace space(outcome_counts(members));
    LhsModel m;
    m.hidden_states = std::move(res.blocks);
    for (int l = 0; l < space.count(); ++l) {
      std::vector<std::vector<double>> resp;
      for (int x = 0; x < space.settings(); ++x) {
        std::vector<double> p(space.outcomes()[x], 0.0);
        p[space.outcome(l, x)] = 1.0;
        resp.push_back(std::move(p));
      }
      m.response.push_back(std::move(resp));
    }
    out.model = std::move(m);
    out.unsteerable = true;
  }
  out.witness = std::move(res.witness);
  return out;
}

AssemblageData assemblage_noise(const AssemblageData& members, double eta) {
  Matrix total = Matrix::Zero(members.front().front().rows(), members.front().front().cols());
  for (const auto& m : members.front()) total += m;
  AssemblageData out = members;
  for (auto& row : out)
    for (auto& m : row) m = eta * m + (1.0 - eta) * m.trace().real() * total;
  return out;
}

RobustnessResult lhs_robustness(const Assemblage& asm_, const CompatOptions& opt,
                                double resolution) {
  checked_space(asm_.members(), opt.strategy_cap);
  auto test = [&](double eta, std::optional<Witness>& w) {
    auto res = lhs_test(assemblage_noise(asm_.members(), eta), opt);
    if (res.unsteerable) return res.certificate.ok ? 1 : 2;
    if (res.witness && res.certificate.ok) {
      w = res.witness;
      return -1;
    }
    return 0;
  };
  return bisect(test, resolution);
}

Matrix SeparableEnsemble::state() const {
  Matrix out = Matrix::Zero(shape.total(), shape.total());
  for (std::size_t i = 0; i < weights.size(); ++i)
    out += weights[i] * kron(alpha[i], beta[i]);
  return out;
}

SeparablePreparation lhs_to_separable_preparation(const LhsModel& m) {
  const auto report = validate_lhs_model(m);
  if (!report.ok()) throw ValidationError("lhs_to_separable_preparation: " + report.summary());
  const int L = static_cast<int>(m.hidden_states.size());
  const int d = static_cast<int>(m.hidden_states.front().rows());
  SeparablePreparation out;
  out.ensemble.shape = {L, d};
  for (int l = 0; l < L; ++l) {
    const double q = m.hidden_states[l].trace().real();
    Matrix alpha = Matrix::Zero(L, L);
    alpha(l, l) = 1.0;
    out.ensemble.weights.push_back(std::max(q, 0.0));
    out.ensemble.alpha.push_back(std::move(alpha));
    out.ensemble.beta.push_back(q > 1e-14 ? Matrix(m.hidden_states[l] / q)
                                          : Matrix(Matrix::Identity(d, d) / double(d)));
  }
  for (int x = 0; x < m.settings(); ++x) {
    EffectList row;
    for (int a = 0; a < m.outcomes(x); ++a) {
      Matrix e = Matrix::Zero(L, L);
      for (int l = 0; l < L; ++l) e(l, l) = m.response[l][x][a];
      row.push_back(std::move(e));
    }
    out.measurements.push_back(std::move(row));
  }
  return out;
}

LhsModel separable_preparation_to_lhs(const SeparableEnsemble& e,
                                      const MeasurementData& ms) {
  LhsModel m;
  for (std::size_t i = 0; i < e.weights.size(); ++i) {
    m.hidden_states.push_back(e.weights[i] * e.beta[i]);
    std::vector<std::vector<double>> resp;
    for (const auto& row : ms) {
      std::vector<double> p;
      for (const auto& a : row) p.push_back((a * e.alpha[i]).trace().real());
      resp.push_back(std::move(p));
    }
    m.response.push_back(std::move(resp));
  }
  return m;
}

}  // namespace povmc
