#pragma once

// Joint measurability and local-hidden-state models as SDPs over
// deterministic strategies, their noise robustnesses, and the finite
// LHS <-> separable-preparation converters.

#include <functional>
#include <optional>
#include <vector>

#include "povmc/quantum.hpp"
#include "povmc/sdp.hpp"

namespace povmc {

inline constexpr int kDefaultStrategyCap = 4096;

/// Deterministic strategies lambda in prod_x {0..o_x-1}, mixed radix with
/// setting 0 fastest.
class StrategySpace {
 public:
  explicit StrategySpace(std::vector<int> outcomes);

  int count() const { return count_; }
  int settings() const { return static_cast<int>(outcomes_.size()); }
  const std::vector<int>& outcomes() const { return outcomes_; }
  int outcome(int lambda, int x) const {
    return (lambda / stride_[x]) % outcomes_[x];
  }

 private:
  std::vector<int> outcomes_, stride_;
  int count_ = 1;
};

struct CompatOptions {
  int strategy_cap = kDefaultStrategyCap;
  SdpOptions sdp;
};

/// Parent POVM over deterministic strategies.
struct ParentModel {
  std::vector<int> outcomes;  // per setting
  std::vector<Matrix> parent; // G_lambda, one per strategy

  int outcome(int lambda, int x) const {
    return StrategySpace(outcomes).outcome(lambda, x);
  }
  /// sum_{lambda: lambda(x)=a} G_lambda.
  MeasurementData reconstruct() const;
};

/// Witness F_{a|x} with sum_x F_{lambda(x)|x} <= 0 for every strategy, so
/// sum tr(F M) <= 0 on every compatible set (resp. sum tr(F sigma) <= 0 on
/// every LHS assemblage). `value` is the observed sum; value > 0 certifies.
struct Witness {
  MeasurementData operators;  // [x][a]
  double value = 0.0;
  double repair = 0.0;        // identity shift applied to make the bound exact
};

struct JmResult {
  bool compatible = false;
  std::optional<ParentModel> parent;
  std::optional<Witness> witness;
  SdpSolution sdp;
  CertificateReport certificate;
};

/// Throws RefusalError when the strategy count exceeds the cap.
JmResult jm_test(const MeasurementSet& ms, const CompatOptions& opt = {});
JmResult jm_test(const MeasurementData& ms, const CompatOptions& opt = {});

/// Noise map (data, eta) -> noisy data; eta = 1 is the identity.
using NoiseMap = std::function<MeasurementData(const MeasurementData&, double)>;

/// eta M_{a|x} + (1 - eta) tr(M_{a|x}) I/d.
MeasurementData depolarizing_noise(const MeasurementData& ms, double eta);

struct RobustnessResult {
  double eta = 0.0;  // midpoint of the final bracket
  double lo = 0.0;   // certified feasible (or 0)
  double hi = 1.0;   // certified infeasible (or 1 when compatible at 1)
  bool certified = true;
  int solves = 0;
  std::optional<Witness> witness;  // at hi, when hi < 1
};

/// Bisection on eta to `resolution` (1e-4 by default).
RobustnessResult jm_depolarizing_robustness(const MeasurementSet& ms,
                                            const CompatOptions& opt = {},
                                            const NoiseMap& noise = depolarizing_noise,
                                            double resolution = 1e-4);

// --- steering -----------------------------------------------------------

struct LhsModel {
  std::vector<Matrix> hidden_states;                  // T_lambda
  std::vector<std::vector<std::vector<double>>> response;  // [lambda][x][a]

  int settings() const;
  int outcomes(int x) const;
  AssemblageData reconstruct() const;
};

ValidationReport validate_lhs_model(const LhsModel& m);

struct LhsResult {
  bool unsteerable = false;
  std::optional<LhsModel> model;  // deterministic responses over strategies
  std::optional<Witness> witness;
  SdpSolution sdp;
  CertificateReport certificate;
};

LhsResult lhs_test(const Assemblage& asm_, const CompatOptions& opt = {});
LhsResult lhs_test(const AssemblageData& members, const CompatOptions& opt = {});

/// eta sigma_{a|x} + (1 - eta) tr(sigma_{a|x}) sigma, sigma the total.
AssemblageData assemblage_noise(const AssemblageData& members, double eta);

RobustnessResult lhs_robustness(const Assemblage& asm_,
                                const CompatOptions& opt = {},
                                double resolution = 1e-4);

struct SeparableEnsemble {
  BipartiteShape shape;
  std::vector<double> weights;
  std::vector<Matrix> alpha;  // states on A
  std::vector<Matrix> beta;   // states on B

  Matrix state() const;
};

struct SeparablePreparation {
  SeparableEnsemble ensemble;
  MeasurementData measurements;  // on A
};

/// A = C^L with alpha_l = |l><l|, beta_l = T_l / tr T_l, weights tr T_l and
/// A_{a|x} = sum_l p(a|x,l)|l><l|. Hidden states with zero trace keep weight
/// 0 and beta = I/d.
SeparablePreparation lhs_to_separable_preparation(const LhsModel& m);

/// T_i = q_i beta_i, p(a|x,i) = tr(A_{a|x} alpha_i).
LhsModel separable_preparation_to_lhs(const SeparableEnsemble& e,
                                      const MeasurementData& ms);

}  // namespace povmc
