#pragma once

// Validated value types for states, measurements, channels and
// assemblages, plus the constructive conversions between them.
//
// Every constructor checks its invariants and throws ValidationError with
// the full report on failure. The validate_* functions run the same checks
// on raw data and return the report instead of throwing.
//
// Choi convention: for a channel L: L(C^din) -> L(C^dout) the Choi matrix is
// the state (L (x) id)(|Phi><Phi|) on out (x) in with
// |Phi> = din^{-1/2} sum_k |k>|k>. It has trace 1 and tr_out J = I/din; the
// unnormalized Choi operator is din * J.

#include <optional>
#include <string>
#include <vector>

#include "povmc/linalg.hpp"

namespace povmc {

/// Tolerances used by the type invariants.
inline constexpr double kNormTol = 1e-9;      // POVM / TP / nonsignalling sums
inline constexpr double kTraceTol = 1e-10;    // unit trace of states

struct Violation {
  std::string what;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string what, double magnitude) {
    violations.push_back({std::move(what), magnitude});
  }
  void merge(const ValidationReport& other, const std::string& prefix);
  std::string summary() const;
};

using EffectList = std::vector<Matrix>;
using MeasurementData = std::vector<EffectList>;   // [x][a]
using AssemblageData = std::vector<EffectList>;    // [x][a]

ValidationReport validate_state(const Matrix& rho);
ValidationReport validate_povm(const EffectList& effects);
ValidationReport validate_measurement_set(const MeasurementData& povms);
ValidationReport validate_assemblage(const AssemblageData& members);
ValidationReport validate_kraus(const std::vector<Matrix>& ops);
ValidationReport validate_choi(const Matrix& j, const BipartiteShape& shape);
ValidationReport validate_instrument(
    const std::vector<std::vector<Matrix>>& branches);

class DensityState {
 public:
  explicit DensityState(Matrix rho);
  static DensityState maximally_mixed(int d);

  const Matrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  Matrix rho_;
};

class Povm {
 public:
  explicit Povm(EffectList effects);

  int outcomes() const { return static_cast<int>(effects_.size()); }
  int dim() const { return static_cast<int>(effects_.front().rows()); }
  const Matrix& effect(int a) const { return effects_[a]; }
  const EffectList& effects() const { return effects_; }

 private:
  EffectList effects_;
};

class MeasurementSet {
 public:
  explicit MeasurementSet(std::vector<Povm> povms);
  explicit MeasurementSet(const MeasurementData& data);

  int settings() const { return static_cast<int>(povms_.size()); }
  int dim() const { return povms_.front().dim(); }
  int outcomes(int x) const { return povms_[x].outcomes(); }
  const Povm& povm(int x) const { return povms_[x]; }
  const Matrix& effect(int a, int x) const { return povms_[x].effect(a); }
  const std::vector<Povm>& povms() const { return povms_; }
  MeasurementData data() const;

 private:
  std::vector<Povm> povms_;
};

/// Setting-indexed families of subnormalized states sigma_{a|x} with a
/// common total; members are stored unnormalized.
class Assemblage {
 public:
  explicit Assemblage(AssemblageData members);

  int settings() const { return static_cast<int>(members_.size()); }
  int outcomes(int x) const { return static_cast<int>(members_[x].size()); }
  int dim() const { return static_cast<int>(members_.front().front().rows()); }
  const Matrix& member(int a, int x) const { return members_[x][a]; }
  const AssemblageData& members() const { return members_; }
  const DensityState& total() const { return total_; }

 private:
  AssemblageData members_;
  DensityState total_;
};

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> ops);

  int d_in() const { return static_cast<int>(ops_.front().cols()); }
  int d_out() const { return static_cast<int>(ops_.front().rows()); }
  const std::vector<Matrix>& ops() const { return ops_; }

 private:
  std::vector<Matrix> ops_;
};

class ChoiMatrix {
 public:
  /// shape = (d_out, d_in).
  ChoiMatrix(Matrix j, BipartiteShape shape);

  const Matrix& matrix() const { return j_; }
  const BipartiteShape& shape() const { return shape_; }

 private:
  Matrix j_;
  BipartiteShape shape_;
};

/// Family of CP maps E_lambda (each a list of Kraus operators d -> n)
/// whose sum is trace preserving.
class Instrument {
 public:
  explicit Instrument(std::vector<std::vector<Matrix>> branches);

  int branches() const { return static_cast<int>(branches_.size()); }
  int d_in() const;
  const std::vector<Matrix>& branch(int l) const { return branches_[l]; }
  const std::vector<std::vector<Matrix>>& all() const { return branches_; }

  /// E_l(rho).
  Matrix apply(int l, const Matrix& rho) const;
  /// E_l^*(a).
  Matrix adjoint(int l, const Matrix& a) const;

 private:
  std::vector<std::vector<Matrix>> branches_;
};

/// Finite-weight pointwise Kraus model: weights mu(l), operators K_l
/// (d -> n_l) of rank at most rank_bound with sum_l mu(l) K_l^* K_l = I, and
/// per-branch local measurements N_{a|x,l} on C^{n_l}.
///
/// `basis` records, when present, the isometry C^{n_l} -> A whose columns
/// are the partial Schmidt basis the branch measurements were transposed
/// in; evaluation uses the stored measurements as they are.
class PointwiseKrausModel {
 public:
  struct Branch {
    double weight = 0.0;
    Matrix kraus;
    MeasurementData measurements;  // [x][a], each on C^{kraus.rows()}
    std::optional<Matrix> basis;
  };

  PointwiseKrausModel(std::vector<Branch> branches, int rank_bound,
                      double rank_tol = kRankTol);

  int rank_bound() const { return rank_bound_; }
  int dim() const { return static_cast<int>(branches_.front().kraus.cols()); }
  int settings() const {
    return static_cast<int>(branches_.front().measurements.size());
  }
  int outcomes(int x) const {
    return static_cast<int>(branches_.front().measurements[x].size());
  }
  int size() const { return static_cast<int>(branches_.size()); }
  const Branch& branch(int l) const { return branches_[l]; }
  const std::vector<Branch>& branches() const { return branches_; }

  /// Instrument E_l(rho) = mu(l) K_l rho K_l^*.
  Instrument instrument() const;

 private:
  std::vector<Branch> branches_;
  int rank_bound_;
};

ValidationReport validate_pointwise_model(
    const std::vector<PointwiseKrausModel::Branch>& branches, int rank_bound,
    double rank_tol = kRankTol);

/// Weighted pure-state decomposition sum_i w_i |v_i><v_i| of a bipartite
/// operator.
struct PureDecomposition {
  std::vector<double> weights;
  std::vector<Vector> vectors;  // unit vectors
  BipartiteShape shape;

  Matrix reconstruct() const;
};

// --- conversions --------------------------------------------------------

ChoiMatrix choi_of_channel(const KrausChannel& c);
KrausChannel kraus_of_choi(const ChoiMatrix& j, double rank_tol = kRankTol);

Matrix apply_channel(const KrausChannel& c, const Matrix& rho);
DensityState apply_channel(const KrausChannel& c, const DensityState& rho);
Matrix heisenberg_apply(const KrausChannel& c, const Matrix& a);

/// sigma_{a|x} = tr_A[(A_{a|x} (x) I) rho] for rho on A (x) B.
Assemblage assemblage_from(const DensityState& rho, const BipartiteShape& shape,
                           const MeasurementSet& ms);
AssemblageData assemblage_data_from(const Matrix& rho,
                                    const BipartiteShape& shape,
                                    const MeasurementData& ms);

/// sigma^{1/2} M_{a|x} sigma^{1/2}; sigma must be full rank.
Assemblage sandwich(const DensityState& sigma, const MeasurementSet& ms,
                    double rank_tol = kRankTol);
/// total^{-1/2} sigma_{a|x} total^{-1/2}; the total must be full rank.
MeasurementSet unsandwich(const Assemblage& asm_, double rank_tol = kRankTol);

/// max_i SR(v_i) over a decomposition that must reconstruct rho within
/// 1e-8 (ValidationError otherwise): an upper bound on SN(rho).
int sn_upper_from_decomposition(const Matrix& rho,
                                const PureDecomposition& decomposition,
                                double rank_tol = kRankTol);

struct EntangledFractionBound {
  int bound = 1;        // lower bound on the Schmidt number
  double fraction = 0;  // best <Phi_U|rho|Phi_U> found
  Matrix unitary;       // Phi_U = (U (x) I)|Phi+>
};

/// Lower bound on SN(rho) for rho on d (x) d from the maximally entangled
/// fraction F: SN(rho) >= ceil(d F). F is maximized over Phi_U by
/// monotone polar ascent from several starts; any attained F gives a
/// valid bound.
EntangledFractionBound sn_lower_entangled_fraction(const Matrix& rho, int d);

/// Largest deviation max |a - b| across two families of matrices of the
/// same layout (Frobenius per entry).
double max_deviation(const std::vector<EffectList>& a,
                     const std::vector<EffectList>& b);

}  // namespace povmc
