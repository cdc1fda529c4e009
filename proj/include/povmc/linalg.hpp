#pragma once

// Dense complex linear algebra shared by every other part of the toolkit.
//
// Conventions:
//   * Bipartite vectors and operators on A (x) B use the Kronecker index
//     i_a * dim_b + i_b.
//   * vec_to_op maps phi in K (x) H to the operator F: H -> K with
//     <m|F|k> = <m (x) k|phi>; op_to_vec is its inverse.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace povmc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default absolute tolerances on eigenvalues.
inline constexpr double kHermTol = 1e-8;
inline constexpr double kPsdTol = 1e-8;
/// Default relative rank cutoff (fraction of the largest eigenvalue or
/// singular value).
inline constexpr double kRankTol = 1e-8;

struct BipartiteShape {
  int dim_a = 1;
  int dim_b = 1;

  int total() const { return dim_a * dim_b; }
  bool operator==(const BipartiteShape&) const = default;
};

enum class Side { A, B };

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // orthonormal columns, phase-fixed
};

struct SchmidtDecomposition {
  RealVector coefficients;  // descending, nonnegative
  Matrix left;              // columns: orthonormal vectors on A
  Matrix right;             // columns: orthonormal vectors on B
};

/// Largest entry of |h - h^*|.
double hermiticity_defect(const Matrix& h);

/// (h + h^*) / 2.
Matrix hermitian_part(const Matrix& h);

/// Spectral decomposition of a Hermitian matrix. Eigenvalues come out in
/// descending order; each eigenvector is multiplied by a phase so that its
/// first component above 1e-12 in modulus is real and positive.
/// Throws ValidationError when `h` is not Hermitian within `herm_tol`.
EigenDecomposition hermitian_eig(const Matrix& h, double herm_tol = kHermTol);

/// Smallest eigenvalue of a Hermitian matrix (no Hermiticity check).
double min_eigenvalue(const Matrix& h);
double max_eigenvalue(const Matrix& h);

/// Principal square root of a PSD operator. Eigenvalues in [-psd_tol, 0)
/// are clipped to zero; anything below -psd_tol is a DomainError.
Matrix matrix_sqrt(const Matrix& p, double psd_tol = kPsdTol);

/// p^{-1/2} on the support of p, zero on its kernel. Eigenvalues at or
/// below rank_tol * lambda_max count as kernel.
Matrix pinv_sqrt(const Matrix& p, double rank_tol = kRankTol);

/// p^{-1/2} for a full-rank PSD p. DomainError (naming the smallest
/// eigenvalue) when some eigenvalue is at or below rank_tol * lambda_max.
Matrix inv_sqrt_full_rank(const Matrix& p, double rank_tol = kRankTol);

/// Projection of a Hermitian matrix onto the PSD cone (negative
/// eigenvalues set to zero).
Matrix psd_projection(const Matrix& h);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Trace over `side`; the result lives on the other factor.
Matrix partial_trace(const Matrix& op, const BipartiteShape& shape, Side side);

/// F_phi : H -> K with <m|F|k> = <m (x) k|phi>, shape = (dim K, dim H).
Matrix vec_to_op(const Vector& phi, const BipartiteShape& shape);
Vector op_to_vec(const Matrix& op);

/// phi = sum_i c_i left_i (x) right_i. DomainError on the zero vector.
SchmidtDecomposition schmidt_decompose(const Vector& phi,
                                       const BipartiteShape& shape);

/// Number of Schmidt coefficients above rank_tol * (largest coefficient).
int schmidt_rank(const Vector& phi, const BipartiteShape& shape,
                 double rank_tol = kRankTol);

/// |psi> = sum_k sqrt(a_k) |e_k> (x) |e_k> with (a_k, e_k) the
/// phase-fixed descending eigenpairs of sigma. Both marginals equal sigma.
Vector purify(const Matrix& sigma);

/// Operator with matrix elements <e_j|result|e_k> = <e_k|m|e_j>, i.e. the
/// transpose taken in the orthonormal basis given by the columns of
/// `basis` (square unitary).
Matrix transpose_in_basis(const Matrix& m, const Matrix& basis);

/// Completes the orthonormal columns of `partial` (d x r) to a d x d
/// unitary. Deterministic.
Matrix complete_basis(const Matrix& partial);

/// Normalized trace distance (1/2)||a - b||_1.
double trace_distance(const Matrix& a, const Matrix& b);
double frob_distance(const Matrix& a, const Matrix& b);

/// Rank of a matrix from its singular values, relative cutoff.
int numerical_rank(const Matrix& m, double rank_tol = kRankTol);

/// Outer product |a><b|.
Matrix outer(const Vector& a, const Vector& b);

}  // namespace povmc
