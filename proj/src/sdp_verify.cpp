#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "povmc/sdp.hpp"

namespace povmc {

namespace {

double re_tr(const Matrix& f, const Matrix& x, bool real) {
  // Re tr(F X) = sum_ij Re(F_ij X_ji)
  if (real) return (f.real().cwiseProduct(x.real().transpose())).sum();
  return (f.cwiseProduct(x.transpose())).sum().real();
}

std::vector<Matrix> dual_slacks(const SdpProblem& p, const std::vector<double>& y,
                                bool with_objective) {
  std::vector<Matrix> s;
  for (const auto& b : p.blocks()) s.push_back(Matrix::Zero(b.dim, b.dim));
  if (with_objective && p.objective())
    for (const auto& t : *p.objective()) s[t.block] += t.coeff;
  for (std::size_t i = 0; i < p.constraints().size(); ++i)
    for (const auto& t : p.constraints()[i].terms) s[t.block] -= y[i] * t.coeff;
  for (std::size_t b = 0; b < s.size(); ++b) {
    s[b] = hermitian_part(s[b]);
    if (p.blocks()[b].real) s[b] = s[b].real().cast<cplx>();
  }
  return s;
}

}  // namespace

double farkas_margin(const SdpProblem& p, const std::vector<double>& y) {
  if (y.size() != p.constraints().size())
    return -std::numeric_limits<double>::infinity();
  double by = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) by += y[i] * p.constraints()[i].rhs;
  double lmin = 0.0;
  for (const auto& s : dual_slacks(p, y, false))
    lmin = std::min(lmin, min_eigenvalue(s));
  if (lmin < 0.0) {
    if (!p.trace_bound) return -std::numeric_limits<double>::infinity();
    return by + lmin * *p.trace_bound;
  }
  return by;
}

CertificateReport verify_certificate(const SdpProblem& p, const SdpSolution& s,
                                     double tol) {
  CertificateReport r;
  auto breach = [&](const std::string& what, double v) {
    std::ostringstream os;
    os << what << " (" << v << ")";
    r.breaches.push_back(os.str());
    r.ok = false;
  };
  const auto& cons = p.constraints();

  if (s.status == SdpStatus::infeasible) {
    if (s.duals.size() != cons.size()) {
      breach("Farkas vector has the wrong length", double(s.duals.size()));
      return r;
    }
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& sb : dual_slacks(p, s.duals, false))
      lmin = std::min(lmin, min_eigenvalue(sb));
    r.min_eigenvalue = lmin;
    r.margin = farkas_margin(p, s.duals);
    if (!(r.margin > 0.0)) breach("Farkas margin is not positive", r.margin);
    return r;
  }
  if (s.status != SdpStatus::optimal) {
    breach(std::string("no certificate for status ") + to_string(s.status), 0.0);
    return r;
  }
  if (s.blocks.size() != p.blocks().size()) {
    breach("wrong number of blocks", double(s.blocks.size()));
    return r;
  }
  r.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < s.blocks.size(); ++b) {
    const auto& x = s.blocks[b];
    if (x.rows() != p.blocks()[b].dim) {
      breach("block '" + p.blocks()[b].label + "' has the wrong size", 0.0);
      return r;
    }
    const double herm = hermiticity_defect(x);
    if (herm > tol) breach("block '" + p.blocks()[b].label + "' not Hermitian", herm);
    r.min_eigenvalue = std::min(r.min_eigenvalue, min_eigenvalue(x));
  }
  if (r.min_eigenvalue < -tol) breach("primal block not PSD", r.min_eigenvalue);

  for (std::size_t i = 0; i < cons.size(); ++i) {
    double v = 0.0;
    for (const auto& t : cons[i].terms)
      v += re_tr(t.coeff, s.blocks[t.block], p.blocks()[t.block].real);
    r.primal_residual =
        std::max(r.primal_residual, std::abs(v - cons[i].rhs) / (1.0 + std::abs(cons[i].rhs)));
  }
  if (r.primal_residual > tol) breach("primal residual above tolerance", r.primal_residual);

  if (p.objective()) {
    if (s.duals.size() != cons.size()) {
      breach("dual vector has the wrong length", double(s.duals.size()));
      return r;
    }
    double pobj = 0.0, dobj = 0.0;
    for (const auto& t : *p.objective())
      pobj += re_tr(t.coeff, s.blocks[t.block], p.blocks()[t.block].real);
    for (std::size_t i = 0; i < cons.size(); ++i) dobj += s.duals[i] * cons[i].rhs;
    double dmin = 0.0;
    for (const auto& sb : dual_slacks(p, s.duals, true))
      dmin = std::min(dmin, min_eigenvalue(sb));
    r.dual_residual = -dmin;
    r.gap = (pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (r.dual_residual > tol) breach("dual slack not PSD", r.dual_residual);
    if (std::abs(r.gap) > tol) breach("duality gap above tolerance", r.gap);
    // Weak duality: for dual-feasible y, b^T y <= C.X.
    if (r.gap < -tol) breach("weak duality violated", r.gap);
  }
  return r;
}

}  // namespace povmc
