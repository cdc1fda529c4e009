// Primal-dual interior-point solver (Nesterov-Todd scaling, Mehrotra
// predictor-corrector) for block-diagonal real symmetric SDPs, plus the
// complex embedding, row preprocessing and the phase-I feasibility driver.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "povmc/sdp.hpp"

namespace povmc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Entry {
  int r, c;
  double v;
};

struct Part {
  int block;
  std::vector<Entry> e;
};

// min <C,X>  s.t.  <A_i,X> = b_i,  X >= 0 (block diagonal, real symmetric).
struct RealSdp {
  std::vector<int> dims;
  std::vector<std::vector<Part>> rows;
  VectorXd b;
  std::vector<MatrixXd> c;
};

using Blocks = std::vector<MatrixXd>;

double dot(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double fro(const Blocks& a) { return std::sqrt(dot(a, a)); }

Blocks zeros(const std::vector<int>& dims) {
  Blocks out;
  for (int n : dims) out.push_back(MatrixXd::Zero(n, n));
  return out;
}

Blocks scaled_identity(const std::vector<int>& dims, double s) {
  Blocks out;
  for (int n : dims) out.push_back(s * MatrixXd::Identity(n, n));
  return out;
}

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

VectorXd apply_a(const RealSdp& p, const Blocks& x) {
  VectorXd out(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    double s = 0.0;
    for (const auto& part : p.rows[i])
      for (const auto& e : part.e) s += e.v * x[part.block](e.r, e.c);
    out(i) = s;
  }
  return out;
}

Blocks apply_at(const RealSdp& p, const VectorXd& y) {
  Blocks out = zeros(p.dims);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    if (y(i) == 0.0) continue;
    for (const auto& part : p.rows[i])
      for (const auto& e : part.e) out[part.block](e.r, e.c) += y(i) * e.v;
  }
  return out;
}

// Which rows touch each block, and where.
struct BlockIndex {
  std::vector<std::vector<std::pair<int, int>>> by_block;  // (row, part)
};

BlockIndex index_blocks(const RealSdp& p) {
  BlockIndex idx;
  idx.by_block.resize(p.dims.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i)
    for (std::size_t q = 0; q < p.rows[i].size(); ++q)
      idx.by_block[p.rows[i][q].block].emplace_back(int(i), int(q));
  return idx;
}

// M_ij = <A_i, W A_j W> = <G^T A_i G, G^T A_j G> with W = G G^T, formed
// block by block as R R^T over the transformed rows.
MatrixXd schur(const RealSdp& p, const BlockIndex& idx, const Blocks& g) {
  const int m = static_cast<int>(p.rows.size());
  MatrixXd out = MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < p.dims.size(); ++k) {
    const auto& list = idx.by_block[k];
    if (list.empty()) continue;
    const int n = p.dims[k];
    const MatrixXd& gk = g[k];
    MatrixXd r(list.size(), n * n);
    MatrixXd t(n, n);
    for (std::size_t q = 0; q < list.size(); ++q) {
      const auto& part = p.rows[list[q].first][list[q].second];
      // G^T A G from the entries: sum v g_r^T g_c over rows of G.
      t.setZero();
      if (int(part.e.size()) * 4 < n * n) {
        for (const auto& e : part.e) t.noalias() += e.v * gk.row(e.r).transpose() * gk.row(e.c);
      } else {
        MatrixXd a = MatrixXd::Zero(n, n);
        for (const auto& e : part.e) a(e.r, e.c) += e.v;
        t.noalias() = gk.transpose() * a * gk;
      }
      r.row(q) = Eigen::Map<const Eigen::RowVectorXd>(t.data(), n * n);
    }
    MatrixXd sub = MatrixXd::Zero(list.size(), list.size());
    sub.selfadjointView<Eigen::Lower>().rankUpdate(r);
    for (std::size_t a = 0; a < list.size(); ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        const int i = list[a].first, j = list[b].first;
        out(i, j) += sub(a, b);
        if (i != j) out(j, i) += sub(a, b);
      }
  }
  return out;
}

// --- row preprocessing --------------------------------------------------

struct RowReduction {
  std::vector<int> kept;
  bool inconsistent = false;
  VectorXd farkas;  // over all rows, when inconsistent
};

// Pivoted Cholesky on the Gram matrix of unit-norm rows finds a maximal
// independent subset; dropped rows are checked for consistency with b.
RowReduction reduce_rows(const RealSdp& p, double tol) {
  const int m = static_cast<int>(p.rows.size());
  RowReduction out;
  if (m == 0) return out;
  const BlockIndex idx = index_blocks(p);
  Blocks eye = scaled_identity(p.dims, 1.0);
  MatrixXd g = schur(p, idx, eye);

  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  MatrixXd l = MatrixXd::Zero(m, m);
  VectorXd diag = g.diagonal();
  int r = 0;
  for (; r < m; ++r) {
    int piv = r;
    for (int i = r + 1; i < m; ++i)
      if (diag(perm[i]) > diag(perm[piv])) piv = i;
    if (diag(perm[piv]) < 1e-12) break;
    std::swap(perm[r], perm[piv]);
    const int pr = perm[r];
    const double lrr = std::sqrt(diag(pr));
    l(pr, r) = lrr;
    for (int i = r + 1; i < m; ++i) {
      const int pi = perm[i];
      double s = g(pi, pr);
      for (int k = 0; k < r; ++k) s -= l(pi, k) * l(pr, k);
      l(pi, r) = s / lrr;
      diag(pi) -= l(pi, r) * l(pi, r);
    }
  }
  out.kept.assign(perm.begin(), perm.begin() + r);
  std::sort(out.kept.begin(), out.kept.end());
  if (r == m) return out;

  // Express each dropped row in the kept ones: c = G_KK^{-1} G_Kj.
  MatrixXd gkk(r, r);
  for (int a = 0; a < r; ++a)
    for (int b2 = 0; b2 < r; ++b2) gkk(a, b2) = g(out.kept[a], out.kept[b2]);
  Eigen::LDLT<MatrixXd> ldlt(gkk);
  VectorXd bk(r);
  for (int a = 0; a < r; ++a) bk(a) = p.b(out.kept[a]);
  double worst = 0.0;
  for (int q = r; q < m; ++q) {
    const int j = perm[q];
    VectorXd gkj(r);
    for (int a = 0; a < r; ++a) gkj(a) = g(out.kept[a], j);
    VectorXd c = r ? VectorXd(ldlt.solve(gkj)) : VectorXd();
    const double res = p.b(j) - (r ? c.dot(bk) : 0.0);
    const double allowed = tol * (1.0 + (r ? c.lpNorm<1>() : 0.0));
    if (std::abs(res) > allowed && std::abs(res) > worst) {
      worst = std::abs(res);
      out.inconsistent = true;
      out.farkas = VectorXd::Zero(m);
      const double sgn = res > 0 ? 1.0 : -1.0;
      out.farkas(j) = sgn;
      for (int a = 0; a < r; ++a) out.farkas(out.kept[a]) = -sgn * c(a);
    }
  }
  return out;
}

RealSdp select_rows(const RealSdp& p, const std::vector<int>& kept) {
  RealSdp out;
  out.dims = p.dims;
  out.c = p.c;
  out.b.resize(kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a) {
    out.rows.push_back(p.rows[kept[a]]);
    out.b(a) = p.b(kept[a]);
  }
  return out;
}

// --- interior point -----------------------------------------------------

struct IpmState {
  Blocks x, s;
  VectorXd y;
  double pres = 0, dres = 0, gap = 0, pobj = 0, dobj = 0;
  int iter = 0;
};

enum class IpmStop { converged, early, stalled, max_iter };

struct Scaling {
  Blocks g, ginv, w;
  std::vector<VectorXd> d;
};

bool nt_scaling(const Blocks& x, const Blocks& s, Scaling& sc) {
  const std::size_t nb = x.size();
  sc.g.resize(nb);
  sc.ginv.resize(nb);
  sc.w.resize(nb);
  sc.d.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    Eigen::LLT<MatrixXd> lx(x[k]);
    if (lx.info() != Eigen::Success) return false;
    MatrixXd l = lx.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(l.transpose() * s[k] * l));
    VectorXd lam = es.eigenvalues();
    if (lam.minCoeff() <= 0.0) return false;
    VectorXd dd = lam.cwiseSqrt();
    VectorXd isd = dd.cwiseSqrt().cwiseInverse();
    sc.d[k] = dd;
    sc.g[k] = l * es.eigenvectors() * isd.asDiagonal();
    // G^{-1} = D^{1/2} U^T L^{-1}
    MatrixXd linv = l.triangularView<Eigen::Lower>().solve(
        MatrixXd::Identity(l.rows(), l.cols()));
    sc.ginv[k] = dd.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose() * linv;
    sc.w[k] = sym(sc.g[k] * sc.g[k].transpose());
  }
  return true;
}

double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<MatrixXd> lx(x[k]);
    MatrixXd l = lx.matrixL();
    MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx[k]);
    MatrixXd tt = t.transpose();
    t = l.triangularView<Eigen::Lower>().solve(tt);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(t), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

using EarlyStop = std::function<bool(const IpmState&)>;

IpmStop run_ipm(const RealSdp& p, double tol, int max_iter, IpmState& st,
                const EarlyStop& early) {
  const int m = static_cast<int>(p.rows.size());
  int total_dim = 0;
  for (int n : p.dims) total_dim += n;
  const double nn = double(total_dim);
  const BlockIndex idx = index_blocks(p);

  const double bnorm = p.b.norm(), cnorm = fro(p.c);
  double bmax = p.b.size() ? p.b.cwiseAbs().maxCoeff() : 0.0;
  const double xi = std::max({10.0, std::sqrt(nn), nn * (1.0 + bmax) / 2.0});
  const double eta = std::max({10.0, std::sqrt(nn), cnorm});
  st.x = scaled_identity(p.dims, xi);
  st.s = scaled_identity(p.dims, eta);
  st.y = VectorXd::Zero(m);

  static const bool trace = std::getenv("POVMC_SDP_TRACE") != nullptr;
  int slow = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  for (st.iter = 0; st.iter < max_iter; ++st.iter) {
    const VectorXd rp = p.b - apply_a(p, st.x);
    Blocks atY = apply_at(p, st.y);
    Blocks rd(p.dims.size());
    for (std::size_t k = 0; k < rd.size(); ++k) rd[k] = p.c[k] - atY[k] - st.s[k];
    st.pobj = dot(p.c, st.x);
    st.dobj = p.b.dot(st.y);
    st.pres = rp.norm() / (1.0 + bnorm);
    st.dres = fro(rd) / (1.0 + cnorm);
    st.gap = std::abs(st.pobj - st.dobj) / (1.0 + std::abs(st.pobj) + std::abs(st.dobj));
    const double mu = dot(st.x, st.s) / nn;

    if (early && early(st)) return IpmStop::early;
    if (st.pres <= tol && st.dres <= tol && st.gap <= tol) return IpmStop::converged;

    const double merit = std::max({st.pres, st.dres, st.gap});
    if (merit < 0.9 * best_merit) {
      best_merit = merit;
      slow = 0;
    } else if (++slow > 40) {
      return IpmStop::stalled;
    }

    Scaling sc;
    if (trace)
      std::fprintf(stderr, "it %d pres %.3e dres %.3e gap %.3e mu %.3e\n", st.iter,
                   st.pres, st.dres, st.gap, mu);
    if (!nt_scaling(st.x, st.s, sc)) return IpmStop::stalled;

    Eigen::LLT<MatrixXd> chol;
    {
      MatrixXd mm = schur(p, idx, sc.g);
      chol.compute(mm);
      if (chol.info() != Eigen::Success) {
        const double bump = 1e-13 * std::max(1.0, mm.diagonal().maxCoeff());
        mm.diagonal().array() += bump;
        chol.compute(mm);
        if (chol.info() != Eigen::Success) return IpmStop::stalled;
      }
    }
    Blocks wrdw(p.dims.size());
    for (std::size_t k = 0; k < wrdw.size(); ++k) wrdw[k] = sc.w[k] * rd[k] * sc.w[k];
    const VectorXd a_wrdw = apply_a(p, wrdw);

    // Direction for a given right-hand side of the scaled complementarity.
    auto direction = [&](const std::vector<MatrixXd>& rhs, Blocks& dx, Blocks& ds,
                         VectorXd& dy) {
      Blocks ghg(p.dims.size());
      for (std::size_t k = 0; k < ghg.size(); ++k) {
        const VectorXd& d = sc.d[k];
        MatrixXd h = rhs[k];
        for (int i = 0; i < h.rows(); ++i)
          for (int j = 0; j < h.cols(); ++j) h(i, j) /= d(i) + d(j);
        ghg[k] = sc.g[k] * h * sc.g[k].transpose();
      }
      dy = chol.solve(rp - apply_a(p, ghg) + a_wrdw);
      Blocks aty = apply_at(p, dy);
      ds.resize(ghg.size());
      dx.resize(ghg.size());
      for (std::size_t k = 0; k < ghg.size(); ++k) {
        ds[k] = sym(rd[k] - aty[k]);
        dx[k] = sym(ghg[k] - sc.w[k] * ds[k] * sc.w[k]);
      }
    };

    std::vector<MatrixXd> rhs(p.dims.size());
    for (std::size_t k = 0; k < rhs.size(); ++k)
      rhs[k] = MatrixXd(-2.0 * sc.d[k].array().square().matrix().asDiagonal());
    Blocks dx, ds;
    VectorXd dy;
    direction(rhs, dx, ds, dy);
    const double ap = std::min(1.0, max_step(st.x, dx));
    const double ad = std::min(1.0, max_step(st.s, ds));
    double mu_aff = 0.0;
    {
      Blocks xa(dx.size()), sa(ds.size());
      for (std::size_t k = 0; k < dx.size(); ++k) {
        xa[k] = st.x[k] + ap * dx[k];
        sa[k] = st.s[k] + ad * ds[k];
      }
      mu_aff = dot(xa, sa) / nn;
    }
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (std::size_t k = 0; k < rhs.size(); ++k) {
      MatrixXd dxt = sc.ginv[k] * dx[k] * sc.ginv[k].transpose();
      MatrixXd dst = sc.g[k].transpose() * ds[k] * sc.g[k];
      MatrixXd cross = dxt * dst;
      rhs[k] = 2.0 * sigma * mu * MatrixXd::Identity(dxt.rows(), dxt.cols()) -
               MatrixXd(2.0 * sc.d[k].array().square().matrix().asDiagonal()) -
               (cross + cross.transpose());
    }
    direction(rhs, dx, ds, dy);
    const double step_p = std::min(1.0, 0.98 * max_step(st.x, dx));
    const double step_d = std::min(1.0, 0.98 * max_step(st.s, ds));
    for (std::size_t k = 0; k < dx.size(); ++k) {
      st.x[k] = sym(st.x[k] + step_p * dx[k]);
      st.s[k] = sym(st.s[k] + step_d * ds[k]);
    }
    st.y += step_d * dy;
    if (step_p < 1e-12 && step_d < 1e-12) return IpmStop::stalled;
  }
  return IpmStop::max_iter;
}

// --- complex <-> real embedding -----------------------------------------

struct Embedding {
  RealSdp sdp;
  std::vector<double> row_norm;  // scaling applied to each user row
};

void embed_coeff(const Matrix& f_in, int n, bool real, double scale,
                 std::vector<Entry>& out) {
  const Matrix f = hermitian_part(f_in);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double re = f(r, c).real() * scale, im = f(r, c).imag() * scale;
      if (real) {
        if (re != 0.0) out.push_back({r, c, re});
        continue;
      }
      if (re != 0.0) {
        out.push_back({r, c, 0.5 * re});
        out.push_back({r + n, c + n, 0.5 * re});
      }
      if (im != 0.0) {
        out.push_back({r, c + n, -0.5 * im});
        out.push_back({r + n, c, 0.5 * im});
      }
    }
  }
}

Embedding embed(const SdpProblem& p) {
  Embedding em;
  auto& s = em.sdp;
  for (const auto& b : p.blocks()) {
    const int n = b.real ? b.dim : 2 * b.dim;
    s.dims.push_back(n);
    s.c.push_back(MatrixXd::Zero(n, n));
  }
  if (p.objective())
    for (const auto& t : *p.objective()) {
      std::vector<Entry> es;
      const auto& b = p.blocks()[t.block];
      embed_coeff(t.coeff, b.dim, b.real, 1.0, es);
      for (const auto& e : es) s.c[t.block](e.r, e.c) += e.v;
    }
  const auto& cons = p.constraints();
  s.b.resize(cons.size());
  for (std::size_t i = 0; i < cons.size(); ++i) {
    std::vector<Part> parts;
    for (const auto& t : cons[i].terms) {
      const auto& b = p.blocks()[t.block];
      Part part{t.block, {}};
      embed_coeff(t.coeff, b.dim, b.real, 1.0, part.e);
      // Merge with an earlier term on the same block.
      bool merged = false;
      for (auto& q : parts)
        if (q.block == t.block) {
          q.e.insert(q.e.end(), part.e.begin(), part.e.end());
          merged = true;
        }
      if (!merged && !part.e.empty()) parts.push_back(std::move(part));
    }
    double nrm2 = 0.0;
    for (const auto& q : parts) {
      MatrixXd dense = MatrixXd::Zero(s.dims[q.block], s.dims[q.block]);
      for (const auto& e : q.e) dense(e.r, e.c) += e.v;
      nrm2 += dense.squaredNorm();
    }
    const double nrm = std::sqrt(nrm2);
    const double scale = nrm > 0.0 ? 1.0 / nrm : 1.0;
    for (auto& q : parts)
      for (auto& e : q.e) e.v *= scale;
    s.rows.push_back(std::move(parts));
    s.b(i) = cons[i].rhs * scale;
    em.row_norm.push_back(nrm > 0.0 ? nrm : 1.0);
  }
  // Rows that vanish up to rounding become exact zero rows; rescaling
  // them to unit norm would only amplify the noise.
  double top = 0.0;
  for (double r : em.row_norm) top = std::max(top, r);
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    if (em.row_norm[i] < 1e-10 * top) {
      s.rows[i].clear();
      s.b(i) = cons[i].rhs;
      em.row_norm[i] = 1.0;
    }
  return em;
}

Matrix unembed(const MatrixXd& y, bool real) {
  if (real) return y.cast<cplx>();
  const int n = static_cast<int>(y.rows()) / 2;
  const MatrixXd a = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const MatrixXd b = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  Matrix out(n, n);
  out.real() = a;
  out.imag() = b;
  return hermitian_part(out);
}

// Internal duals (over kept scaled rows) -> user duals over all rows.
std::vector<double> user_duals(const Embedding& em, const std::vector<int>& kept,
                               const VectorXd& y) {
  std::vector<double> out(em.row_norm.size(), 0.0);
  for (std::size_t a = 0; a < kept.size(); ++a)
    out[kept[a]] = y(a) / em.row_norm[kept[a]];
  return out;
}

double primal_residual(const SdpProblem& p, const std::vector<Matrix>& x) {
  double worst = 0.0;
  for (const auto& c : p.constraints()) {
    double v = 0.0;
    for (const auto& t : c.terms) {
      if (p.blocks()[t.block].real)
        v += (t.coeff.real().cwiseProduct(x[t.block].real().transpose())).sum();
      else
        v += (t.coeff.cwiseProduct(x[t.block].transpose())).sum().real();
    }
    worst = std::max(worst, std::abs(v - c.rhs) / (1.0 + std::abs(c.rhs)));
  }
  return worst;
}

// Margin of -A^T y for the original b, at the embedded level; complex
// blocks carry half the eigenvalues of the complex dual matrix.
double embedded_margin(const RealSdp& p, const VectorXd& y,
                       const std::vector<SdpBlock>& blocks,
                       std::optional<double> trace_bound, int nblocks) {
  Blocks s = apply_at(p, -y);
  double lmin = 0.0;
  for (int k = 0; k < nblocks; ++k) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(s[k]), Eigen::EigenvaluesOnly);
    const double l = es.eigenvalues()(0) * (blocks[k].real ? 1.0 : 2.0);
    lmin = std::min(lmin, l);
  }
  const double by = p.b.dot(y);
  if (lmin < 0.0) {
    if (!trace_bound) return -std::numeric_limits<double>::infinity();
    return by + lmin * *trace_bound;
  }
  return by;
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt) {
  SdpSolution sol;
  const double tol_int = std::min(1e-9, 0.01 * opt.tol);
  const int nb = static_cast<int>(p.blocks().size());
  Embedding em = embed(p);
  const RowReduction red = reduce_rows(em.sdp, opt.tol);
  if (red.inconsistent) {
    sol.status = SdpStatus::infeasible;
    for (std::size_t i = 0; i < em.row_norm.size(); ++i)
      sol.duals.push_back(red.farkas(i) / em.row_norm[i]);
    sol.certified_margin = farkas_margin(p, sol.duals);
    sol.message = "linearly dependent constraints with inconsistent targets";
    if (!(sol.certified_margin > 0.0)) sol.status = SdpStatus::numerical_trouble;
    return sol;
  }
  const RealSdp core = select_rows(em.sdp, red.kept);

  const bool need_phase1 = !p.objective() || !opt.skip_phase1;
  if (need_phase1) {
    // max t s.t. A(X) + t A(I) = b, X >= 0, written with t = 1 - s, s >= 0.
    RealSdp ph = core;
    ph.dims.push_back(1);
    for (auto& c : ph.c) c.setZero();
    ph.c.push_back(MatrixXd::Ones(1, 1));
    const VectorXd a_eye = apply_a(core, scaled_identity(core.dims, 1.0));
    for (std::size_t i = 0; i < ph.rows.size(); ++i) {
      ph.rows[i].push_back({nb, {{0, 0, -a_eye(i)}}});
      ph.b(i) = core.b(i) - a_eye(i);
    }
    IpmState st;
    double margin = -std::numeric_limits<double>::infinity();
    auto early = [&](const IpmState& s) {
      const double sv = s.x[nb](0, 0);
      if (s.pres <= tol_int && sv <= 1.0) return true;
      if (s.iter % 2 == 0 && s.y.size()) {
        margin = embedded_margin(core, s.y, p.blocks(), p.trace_bound, nb);
        if (margin > 1e-3 * opt.tol) return true;
      }
      return false;
    };
    const IpmStop stop = run_ipm(ph, tol_int, opt.max_iterations, st, early);
    sol.iterations = st.iter;
    const double t = 1.0 - st.x[nb](0, 0);

    // Feasible candidate Y = X + tI, projected to PSD.
    std::vector<Matrix> cand;
    for (int k = 0; k < nb; ++k) {
      MatrixXd yk = st.x[k] + t * MatrixXd::Identity(core.dims[k], core.dims[k]);
      cand.push_back(psd_projection(unembed(yk, p.blocks()[k].real)));
      if (p.blocks()[k].real) cand.back() = cand.back().real().cast<cplx>();
    }
    const double pres = primal_residual(p, cand);
    if (t >= -opt.tol && pres <= opt.tol) {
      if (!p.objective()) {
        sol.status = SdpStatus::optimal;
        sol.blocks = std::move(cand);
        sol.primal_residual = pres;
        sol.duals.assign(p.constraints().size(), 0.0);
        return sol;
      }
    } else {
      std::vector<double> y = user_duals(em, red.kept, st.y);
      const double m = farkas_margin(p, y);
      if (m > 0.0) {
        sol.status = SdpStatus::infeasible;
        sol.duals = std::move(y);
        sol.certified_margin = m;
        sol.message = "phase I optimum t = " + std::to_string(t);
        return sol;
      }
      sol.status = SdpStatus::numerical_trouble;
      sol.primal_residual = pres;
      std::ostringstream os;
      os << "phase I inconclusive (t = " << t << ", residual " << pres
         << ", margin " << m << ", stop " << int(stop) << ")";
      sol.message = os.str();
      return sol;
    }
  }

  IpmState st;
  const IpmStop stop = run_ipm(core, tol_int, opt.max_iterations, st, nullptr);
  sol.iterations += st.iter;
  for (int k = 0; k < nb; ++k) {
    sol.blocks.push_back(unembed(st.x[k], p.blocks()[k].real));
    if (p.blocks()[k].real) sol.blocks.back() = sol.blocks.back().real().cast<cplx>();
  }
  sol.duals = user_duals(em, red.kept, st.y);
  sol.primal_residual = primal_residual(p, sol.blocks);
  sol.dual_residual = st.dres;
  sol.primal_objective = st.pobj;
  sol.dual_objective = st.dobj;
  sol.gap = st.gap;
  const bool ok = sol.primal_residual <= opt.tol && st.dres <= opt.tol && st.gap <= opt.tol;
  sol.status = ok ? SdpStatus::optimal : SdpStatus::numerical_trouble;
  if (!ok) {
    std::ostringstream os;
    os << "interior point stopped (" << int(stop) << ") with residuals "
       << sol.primal_residual << ", " << st.dres << ", gap " << st.gap;
    sol.message = os.str();
  }
  return sol;
}

}  // namespace povmc
