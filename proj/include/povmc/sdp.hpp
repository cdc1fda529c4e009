#pragma once

// Small dense semidefinite programs over complex Hermitian (or real
// symmetric) PSD blocks with scalar equality constraints
//
//     minimize    sum_b Re tr(C_b X_b)
//     subject to  sum_b Re tr(F_ib X_b) = b_i,   X_b >= 0.
//
// Complex blocks are solved through the real symmetric embedding
// X = A + iB  ->  [[A, -B], [B, A]], which doubles the block dimension.
// Without an objective the problem is a feasibility question. Infeasibility
// is only ever reported together with a Farkas vector y such that
// S_b = -sum_i y_i F_ib >= 0 and b^T y > 0.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "povmc/linalg.hpp"

namespace povmc {

struct SdpBlock {
  std::string label;
  int dim = 1;
  bool real = false;  // real symmetric block (coefficients use Re F)
};

struct SdpTerm {
  int block = 0;
  Matrix coeff;  // Hermitian, dim x dim of the block
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  double rhs = 0.0;
};

/// Adjoint L^* of a Hermiticity-preserving linear map L on one block.
using AdjointMap = std::function<Matrix(const Matrix&)>;

class SdpProblem {
 public:
  int add_block(std::string label, int dim, bool real = false);
  int add_constraint(std::vector<SdpTerm> terms, double rhs);

  /// sum_k L_k(X_{block_k}) = target for a Hermitian m x m target, written
  /// as m^2 scalar rows against the orthonormal Hermitian basis (see
  /// hermitian_basis). Returns the index of the first row.
  int add_matrix_equality(const std::vector<std::pair<int, AdjointMap>>& terms,
                          const Matrix& target);

  /// Identity-map shorthand: sum_k X_{blocks_k} = target.
  int add_sum_equality(const std::vector<int>& blocks, const Matrix& target);

  void set_objective(std::vector<SdpTerm> terms);

  const std::vector<SdpBlock>& blocks() const { return blocks_; }
  const std::vector<SdpConstraint>& constraints() const { return constraints_; }
  const std::optional<std::vector<SdpTerm>>& objective() const {
    return objective_;
  }

  /// Known bound sum_b tr X_b <= trace_bound over the feasible set. Lets
  /// an approximate Farkas vector be certified with an explicit margin.
  std::optional<double> trace_bound;

 private:
  std::vector<SdpBlock> blocks_;
  std::vector<SdpConstraint> constraints_;
  std::optional<std::vector<SdpTerm>> objective_;
};

/// Orthonormal basis of m x m Hermitian matrices: E_kk, then for k < l
/// (E_kl + E_lk)/sqrt2 and i(E_kl - E_lk)/sqrt2.
std::vector<Matrix> hermitian_basis(int m);

/// sum_q y[first + q] B_q: the dual matrix of a matrix equality.
Matrix dual_matrix(const std::vector<double>& y, int first, int m);

enum class SdpStatus { optimal, infeasible, numerical_trouble };
const char* to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-7;
  int max_iterations = 500;
  bool skip_phase1 = false;  // optimization problems known to be feasible
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_trouble;
  std::vector<Matrix> blocks;  // X_b at the complex level
  std::vector<double> duals;   // y_i (optimal) or the Farkas vector (infeasible)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double certified_margin = 0.0;  // infeasible only
  int iterations = 0;
  std::string message;
};

SdpSolution solve(const SdpProblem& p, const SdpOptions& opt = {});

struct CertificateReport {
  bool ok = true;
  std::vector<std::string> breaches;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double min_eigenvalue = 0.0;  // over primal blocks (optimal) or S (infeasible)
  double gap = 0.0;
  double margin = 0.0;
};

/// Recomputes residuals, PSD-ness, the duality gap and any Farkas margin
/// directly from the problem data and the returned matrices.
CertificateReport verify_certificate(const SdpProblem& p, const SdpSolution& s,
                                     double tol = 1e-7);

/// Farkas margin b^T y + min(0, lambda_min(S)) * trace_bound with
/// S_b = -sum_i y_i F_ib; -inf when a negative S has no trace bound to
/// absorb it.
double farkas_margin(const SdpProblem& p, const std::vector<double>& y);

}  // namespace povmc
