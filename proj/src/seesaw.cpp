// See-saw search for n-simulation models of the unsandwiched target
// M = sigma^{-1/2} sigma_{a|x} sigma^{-1/2} under the noise
// v M + (1 - v) c_{a|x} I with c_{a|x} = tr(sigma M_{a|x}); the result is
// translated to an n-preparation of the noisy assemblage.
//
// Step A fixes the instrument branches (Kraus lists into C^n) and solves
// for the branch measurements; step B fixes the measurements and solves
// for the branch Choi operators. Each step is an SDP maximizing v whose
// previous solution stays feasible, so v never decreases.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

#include "povmc/compress.hpp"
#include "povmc/errors.hpp"
#include "povmc/random.hpp"

namespace povmc {

namespace {

struct Target {
  int d = 0;
  MeasurementData m;                    // [x][a]
  std::vector<std::vector<double>> c;   // tr(sigma M_{a|x})
};

struct Instr {
  std::vector<std::vector<Matrix>> kraus;  // [l] list of n x d
  std::vector<MeasurementData> meas;       // [l][x][a], n x n
  double v = 0.0;
};

void normalize_kraus(Instr& s) {
  const int d = static_cast<int>(s.kraus.front().front().cols());
  Matrix tp = Matrix::Zero(d, d);
  for (const auto& b : s.kraus)
    for (const auto& k : b) tp += k.adjoint() * k;
  const Matrix fix = inv_sqrt_full_rank(hermitian_part(tp));
  for (auto& b : s.kraus)
    for (auto& k : b) k = k * fix;
}

void normalize_povms(Instr& s) {
  for (auto& branch : s.meas)
    for (auto& povm : branch) {
      const auto n = povm.front().rows();
      Matrix sum = Matrix::Zero(n, n);
      for (auto& e : povm) {
        e = psd_projection(e);
        sum += e;
      }
      const Matrix fix = inv_sqrt_full_rank(hermitian_part(sum));
      for (auto& e : povm) e = hermitian_part(fix * e * fix);
    }
}

// v block and slack u with v + u = 1; objective -v.
std::pair<int, int> add_visibility(SdpProblem& p) {
  const int v = p.add_block("v", 1, true);
  const int u = p.add_block("u", 1, true);
  p.add_constraint({{v, Matrix::Ones(1, 1)}, {u, Matrix::Ones(1, 1)}}, 1.0);
  p.set_objective({{v, -Matrix::Ones(1, 1)}});
  return {v, u};
}

AdjointMap visibility_map(const Target& t, int x, int a) {
  const Matrix shift = t.m[x][a] - t.c[x][a] * Matrix::Identity(t.d, t.d);
  return [shift](const Matrix& b) {
    Matrix out(1, 1);
    out(0, 0) = -(b * shift).trace().real();
    return out;
  };
}

// Measurements for fixed branches.
bool step_a(const Target& t, Instr& s, const SdpOptions& so) {
  const int L = static_cast<int>(s.kraus.size());
  const int n = static_cast<int>(s.kraus.front().front().rows());
  const int X = static_cast<int>(t.m.size());
  SdpProblem p;
  std::vector<std::vector<std::vector<int>>> blk(L);
  for (int l = 0; l < L; ++l) {
    blk[l].resize(X);
    for (int x = 0; x < X; ++x)
      for (std::size_t a = 0; a < t.m[x].size(); ++a) blk[l][x].push_back(p.add_block("N", n));
  }
  const auto [vb, ub] = add_visibility(p);
  (void)ub;
  for (int x = 0; x < X; ++x)
    for (std::size_t a = 0; a < t.m[x].size(); ++a) {
      std::vector<std::pair<int, AdjointMap>> terms;
      for (int l = 0; l < L; ++l) {
        const auto& ks = s.kraus[l];
        terms.emplace_back(blk[l][x][a], [&ks](const Matrix& b) {
          Matrix out = Matrix::Zero(ks.front().rows(), ks.front().rows());
          for (const auto& k : ks) out += k * b * k.adjoint();
          return out;
        });
      }
      terms.emplace_back(vb, visibility_map(t, x, int(a)));
      p.add_matrix_equality(terms, t.c[x][a] * Matrix::Identity(t.d, t.d));
    }
  for (int l = 0; l < L; ++l)
    for (int x = 0; x < X; ++x) p.add_sum_equality(blk[l][x], Matrix::Identity(n, n));

  SdpOptions opt = so;
  opt.skip_phase1 = true;
  const SdpSolution sol = solve(p, opt);
  if (std::getenv("POVMC_SEESAW_TRACE") && sol.status != SdpStatus::optimal)
    std::fprintf(stderr, "seesaw step failed: %s %s\n", to_string(sol.status), sol.message.c_str());
  if (sol.status != SdpStatus::optimal) return false;
  for (int l = 0; l < L; ++l)
    for (int x = 0; x < X; ++x)
      for (std::size_t a = 0; a < t.m[x].size(); ++a) s.meas[l][x][a] = sol.blocks[blk[l][x][a]];
  s.v = sol.blocks[vb](0, 0).real();
  normalize_povms(s);
  return true;
}

// Branch Choi operators J_l on C^n (x) C^d for fixed measurements;
// B -> N (x) B^T is the adjoint of J -> E_l^*(N).
bool step_b(const Target& t, Instr& s, int n, const SdpOptions& so) {
  const int L = static_cast<int>(s.meas.size());
  const int X = static_cast<int>(t.m.size());
  const int d = t.d;
  SdpProblem p;
  std::vector<int> blk;
  for (int l = 0; l < L; ++l) blk.push_back(p.add_block("J", n * d));
  const auto [vb, ub] = add_visibility(p);
  (void)ub;
  for (int x = 0; x < X; ++x)
    for (std::size_t a = 0; a < t.m[x].size(); ++a) {
      std::vector<std::pair<int, AdjointMap>> terms;
      for (int l = 0; l < L; ++l) {
        const Matrix nl = s.meas[l][x][a];
        terms.emplace_back(blk[l], [nl](const Matrix& b) { return kron(nl, b.transpose()); });
      }
      terms.emplace_back(vb, visibility_map(t, x, int(a)));
      p.add_matrix_equality(terms, t.c[x][a] * Matrix::Identity(d, d));
    }
  {
    std::vector<std::pair<int, AdjointMap>> terms;
    const Matrix eye = Matrix::Identity(n, n);
    for (int l = 0; l < L; ++l)
      terms.emplace_back(blk[l], [eye](const Matrix& b) { return kron(eye, b.transpose()); });
    p.add_matrix_equality(terms, Matrix::Identity(d, d));
  }
  SdpOptions opt = so;
  opt.skip_phase1 = true;
  const SdpSolution sol = solve(p, opt);
  if (std::getenv("POVMC_SEESAW_TRACE") && sol.status != SdpStatus::optimal)
    std::fprintf(stderr, "seesaw step failed: %s %s\n", to_string(sol.status), sol.message.c_str());
  if (sol.status != SdpStatus::optimal) return false;
  const BipartiteShape shape{n, d};
  for (int l = 0; l < L; ++l) {
    auto eig = hermitian_eig(hermitian_part(sol.blocks[blk[l]]));
    std::vector<Matrix> ks;
    const double top = std::max(eig.values(0), 0.0);
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      if (eig.values(k) <= 1e-12 * std::max(top, 1.0)) break;
      ks.push_back(std::sqrt(eig.values(k)) * vec_to_op(eig.vectors.col(k), shape));
    }
    if (ks.empty()) ks.push_back(Matrix::Zero(n, d));
    s.kraus[l] = std::move(ks);
  }
  s.v = sol.blocks[vb](0, 0).real();
  normalize_kraus(s);
  return true;
}

struct RestartResult {
  Instr best;
  bool ok = false;
  bool converged = false;
};

RestartResult run_restart(const Target& t, const SeesawOptions& opt, int restart) {
  RestartResult out;
  const int d = t.d, n = opt.n;
  const int X = static_cast<int>(t.m.size());
  Instr s;
  bool start_b = false;
  if (n == 1) {
    // Deterministic responses over all strategies; step B is then exact.
    std::vector<int> outs;
    for (const auto& row : t.m) outs.push_back(static_cast<int>(row.size()));
    StrategySpace space(outs);
    if (space.count() < 0 || space.count() > opt.strategy_cap)
      throw RefusalError("seesaw: strategy count exceeds the cap");
    for (int l = 0; l < space.count(); ++l) {
      MeasurementData md;
      for (int x = 0; x < X; ++x) {
        EffectList row(outs[x], Matrix::Zero(1, 1));
        row[space.outcome(l, x)](0, 0) = 1.0;
        md.push_back(std::move(row));
      }
      s.meas.push_back(std::move(md));
      s.kraus.push_back({Matrix::Zero(1, d)});
    }
    start_b = true;
  } else if (restart == 0) {
    // Start from the exact n = 1 optimum embedded in C^n, so the search
    // never reports less than the n = 1 visibility.
    SeesawOptions o1 = opt;
    o1.n = 1;
    const RestartResult base = run_restart(t, o1, 0);
    if (!base.ok) return out;
    s.kraus.clear();
    for (std::size_t l = 0; l < base.best.kraus.size(); ++l) {
      std::vector<Matrix> ks;
      for (const auto& k : base.best.kraus[l]) {
        Matrix pk = Matrix::Zero(n, d);
        pk.row(0) = k.row(0);
        ks.push_back(std::move(pk));
      }
      s.kraus.push_back(std::move(ks));
      MeasurementData md;
      for (int x = 0; x < X; ++x) {
        EffectList row;
        for (std::size_t a = 0; a < t.m[x].size(); ++a) {
          Matrix e = Matrix::Zero(n, n);
          e(0, 0) = base.best.meas[l][x][a](0, 0);
          if (a == 0) e.bottomRightCorner(n - 1, n - 1).setIdentity();
          row.push_back(std::move(e));
        }
        md.push_back(std::move(row));
      }
      s.meas.push_back(std::move(md));
    }
    s.v = base.best.v;
  } else {
    Rng rng(opt.seed + static_cast<std::uint64_t>(restart));
    const int L = opt.branches > 0 ? opt.branches : 2 * d;
    auto ks = random_kraus(d, n, L, n, rng);
    for (int l = 0; l < L; ++l) {
      s.kraus.push_back({ks[l]});
      MeasurementData md;
      for (int x = 0; x < X; ++x) md.emplace_back(t.m[x].size(), Matrix::Zero(n, n));
      s.meas.push_back(std::move(md));
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  int stale = 0;
  bool use_b = start_b;
  for (int round = 0; round < opt.max_rounds; ++round) {
    Instr next = s;
    const bool ok = use_b ? step_b(t, next, n, opt.sdp) : step_a(t, next, opt.sdp);
    const char step = use_b ? 'B' : 'A';
    use_b = !use_b;
    if (!ok) break;
    s = std::move(next);
    out.ok = true;
    if (std::getenv("POVMC_SEESAW_TRACE"))
      std::fprintf(stderr, "seesaw restart %d round %d step %c v %.9f\n", restart, round, step, s.v);
    if (s.v > best + opt.improve_tol) {
      stale = 0;
    } else {
      ++stale;
    }
    if (s.v > best) {
      best = s.v;
      out.best = s;
    }
    if (s.v >= 1.0 - 1e-9 || stale >= opt.patience) {
      out.converged = true;
      break;
    }
    // n = 1 after the exact step B needs no alternation.
    if (n == 1 && round == 0) {
      out.converged = true;
      break;
    }
  }
  return out;
}

int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("POVMC_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

}  // namespace

SeesawResult seesaw_n_prep(const Assemblage& asm_, const SeesawOptions& opt) {
  const DensityState& sigma = asm_.total();
  const int d = sigma.dim();
  if (opt.n < 1) throw DomainError("seesaw: n must be at least 1");
  const MeasurementSet ms = unsandwich(asm_);
  Target t;
  t.d = d;
  t.m = ms.data();
  for (const auto& row : t.m) {
    std::vector<double> cr;
    for (const auto& e : row) cr.push_back((sigma.matrix() * e).trace().real());
    t.c.push_back(std::move(cr));
  }

  SeesawResult res;
  Instr best;
  if (opt.n >= d) {
    // SR <= d always: one identity branch reproduces the target exactly.
    best.kraus = {{Matrix::Identity(d, d)}};
    best.meas = {t.m};
    best.v = 1.0;
    res.converged = true;
    res.best_restart = 0;
    res.restart_visibilities = {1.0};
  } else {
    const int restarts = opt.n == 1 ? 1 : std::max(1, opt.restarts);
    std::vector<RestartResult> runs(restarts);
    const int threads = std::min(thread_count(opt.threads), restarts);
    if (threads <= 1) {
      for (int r = 0; r < restarts; ++r) runs[r] = run_restart(t, opt, r);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(threads);
      for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
          try {
            for (int r = w; r < restarts; r += threads) runs[r] = run_restart(t, opt, r);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (int r = 0; r < restarts; ++r) {
      res.restart_visibilities.push_back(runs[r].ok ? runs[r].best.v : 0.0);
      if (!runs[r].ok) continue;
      if (res.best_restart < 0 || runs[r].best.v > best.v) {
        best = runs[r].best;
        res.best_restart = r;
        res.converged = runs[r].converged;
      }
    }
    if (res.best_restart < 0) return res;
  }

  // Pointwise model: one branch per Kraus operator with mu = |K|^2 / d.
  std::vector<PointwiseKrausModel::Branch> branches;
  for (std::size_t l = 0; l < best.kraus.size(); ++l)
    for (const auto& k : best.kraus[l]) {
      const double mu = k.squaredNorm() / d;
      if (mu <= 1e-14) continue;
      PointwiseKrausModel::Branch b;
      b.weight = mu;
      b.kraus = k / std::sqrt(mu);
      b.measurements = best.meas[l];
      branches.push_back(std::move(b));
    }
  double wsum = 0.0;
  for (const auto& b : branches) wsum += b.weight;
  for (auto& b : branches) b.weight /= wsum;
  {
    // Absorb the dropped weight into the TP normalization.
    Matrix tp = Matrix::Zero(d, d);
    for (const auto& b : branches) tp += b.weight * b.kraus.adjoint() * b.kraus;
    const Matrix fix = inv_sqrt_full_rank(hermitian_part(tp));
    for (auto& b : branches) b.kraus = b.kraus * fix;
  }
  res.visibility = std::clamp(best.v, 0.0, 1.0);
  res.simulation.emplace(std::move(branches), std::min(opt.n, d));
  res.model = sim_to_prep(*res.simulation, sigma);
  const auto target = assemblage_noise(asm_.members(), res.visibility);
  res.residual = max_deviation(res.model->reconstruct(), target);
  return res;
}

std::vector<CompressionEntry> min_compression_dim(const MeasurementSet& ms,
                                                  const DensityState& sigma, int n_max,
                                                  const SeesawOptions& opt) {
  std::vector<CompressionEntry> out;
  const int d = ms.dim();
  for (int n = 1; n <= n_max; ++n) {
    CompressionEntry e;
    e.n = n;
    if (n == 1) {
      CompatOptions co;
      co.strategy_cap = opt.strategy_cap;
      co.sdp = opt.sdp;
      const auto r = jm_test(ms, co);
      e.exact = r.compatible || r.witness.has_value();
      e.success = r.compatible;
      e.visibility = r.compatible ? 1.0 : 0.0;
    } else if (n >= d) {
      e.success = e.exact = true;
      e.visibility = 1.0;
    } else {
      SeesawOptions so = opt;
      so.n = n;
      const auto r = seesaw_n_prep(sandwich(sigma, ms), so);
      e.visibility = r.visibility;
      e.success = r.visibility >= 1.0 - 1e-6 && r.residual <= 1e-6;
    }
    out.push_back(e);
    if (e.success) break;
  }
  return out;
}

}  // namespace povmc
