#pragma once

// n-simulability and n-preparability: evaluation of pointwise Kraus
// models, the constructive translations between simulation models,
// parent POVMs and preparation models, rank-restricted Kraus extraction
// from Choi decompositions, and the see-saw search.
//
// Measures over hidden variables are finite weight vectors throughout; at
// finite dimension finite mixtures suffice by compactness.

#include <cstdint>
#include <optional>
#include <vector>

#include "povmc/compat.hpp"
#include "povmc/quantum.hpp"

namespace povmc {

/// sum_l p_l tr_A[(N_{a|x,l} (x) I) |psi_l><psi_l|], each psi_l of Schmidt
/// rank at most rank_bound. The A factor may differ between members.
struct PreparationModel {
  struct Member {
    double weight = 0.0;
    Vector state;                  // unit vector on A (x) B
    BipartiteShape shape;
    MeasurementData measurements;  // [x][a] on A
  };
  std::vector<Member> members;
  int rank_bound = 1;

  AssemblageData reconstruct() const;
};

ValidationReport validate_preparation_model(const PreparationModel& m,
                                            double rank_tol = kRankTol);

/// M_{a|x} = sum_l mu(l) K_l^* N_{a|x,l} K_l.
MeasurementData eval_simulation(const PointwiseKrausModel& m);

/// Rank-1 model: each G_lambda is split along its eigenvectors v_j with
/// weight g_j/d, K = sqrt(d) <v_j| and N_{a|x} = delta(a, lambda(x)) on C^1.
/// The parent is first renormalized exactly onto sum G = I.
PointwiseKrausModel one_sim_from_jm(const ParentModel& pm);

/// Parent with a stochastic response kernel.
struct ResponseParent {
  std::vector<Matrix> parent;                               // G_l
  std::vector<std::vector<std::vector<double>>> response;   // [l][x][a]

  MeasurementData reconstruct() const;
  /// Deterministic-strategy parent sum_l prod_x p(lambda_x|x,l) G_l.
  ParentModel deterministic(int strategy_cap = kDefaultStrategyCap) const;
};

/// Requires every Kraus operator to have rank 1: K = s |u><v| gives
/// G = mu s^2 |v><v| and p(a|x) = <u|N_{a|x}|u>. Zero-weight branches are
/// dropped.
ResponseParent jm_from_one_sim(const PointwiseKrausModel& m,
                               double rank_tol = kRankTol);

/// psi_l = sum_i c_i phi_i (x) psi_i gives K_l = diag(c) Psi^* sigma^{-1/2}
/// on C^r and N' = (Phi^* N Phi)^T; Phi is stored as the branch basis.
/// The model reproduces sigma^{-1/2} sigma_{a|x} sigma^{-1/2}.
PointwiseKrausModel prep_to_sim(const PreparationModel& pm,
                                const DensityState& sigma,
                                double rank_tol = kRankTol);

/// F = K sigma^{1/2}, psi = vec(conj F)/|F|, weight mu |F|^2 and Alice
/// measures N^T. Reproduces sigma^{1/2} M_{a|x} sigma^{1/2}.
PreparationModel sim_to_prep(const PointwiseKrausModel& m,
                             const DensityState& sigma);

/// Weighted Kraus family {q_i, K_i}; the channel is A -> sum q_i K_i^* A K_i.
struct WeightedKraus {
  std::vector<double> weights;
  std::vector<Matrix> kraus;

  Matrix heisenberg(const Matrix& a) const;
  Matrix apply(const Matrix& rho) const;
  int max_rank(double rank_tol = kRankTol) const;
  KrausChannel channel() const;
};

/// K_i = F_{phi_i} sigma^{-1/2} from a decomposition of a Choi-type state
/// on K (x) H whose H-marginal must equal sigma^T within 1e-7.
WeightedKraus peb_kraus_extraction(const PureDecomposition& decomposition,
                                   const DensityState& sigma);

/// Members vec(K_l sigma^{1/2}) / norm with weights |K_l sigma^{1/2}|^2:
/// a decomposition of (Lambda (x) id)(psi_sigma) with SR(member) =
/// rank K_l. sigma defaults to I/d, where the sum is the Choi state.
PureDecomposition kraus_to_choi_sn_witness(
    const KrausChannel& c, const std::optional<DensityState>& sigma = {});

// --- see-saw ------------------------------------------------------------

struct SeesawOptions {
  int n = 2;
  int restarts = 20;
  std::uint64_t seed = 0;
  int branches = 0;        // instrument branches; 0 = 2d
  int max_rounds = 200;
  int patience = 5;        // rounds without improvement > improve_tol
  double improve_tol = 1e-7;
  int threads = 0;         // 0 = POVMC_THREADS or 1
  SdpOptions sdp;
  int strategy_cap = kDefaultStrategyCap;  // n = 1 branch enumeration
};

struct SeesawResult {
  double visibility = 0.0;
  std::optional<PreparationModel> model;          // reproduces the noisy target
  std::optional<PointwiseKrausModel> simulation;  // on the unsandwiched set
  double residual = 0.0;   // max deviation of the model from the noisy target
  bool converged = false;
  int best_restart = -1;
  std::vector<double> restart_visibilities;
};

/// Heuristic lower bound on the largest v such that
/// v sigma_{a|x} + (1 - v) tr(sigma_{a|x}) sigma is n-preparable. The total
/// sigma must be full rank.
SeesawResult seesaw_n_prep(const Assemblage& asm_, const SeesawOptions& opt);

struct CompressionEntry {
  int n = 1;
  bool success = false;
  bool exact = false;       // certificate-backed answer
  double visibility = 0.0;  // best visibility found (1 = success)
};

/// n = 1 is decided exactly by jm_test; n >= d is trivially simulable;
/// other n are see-saw lower bounds on the sandwiched assemblage.
std::vector<CompressionEntry> min_compression_dim(const MeasurementSet& ms,
                                                  const DensityState& sigma,
                                                  int n_max,
                                                  const SeesawOptions& opt = {});

}  // namespace povmc
