#include "povmc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "povmc/errors.hpp"

namespace povmc {

namespace {

void fix_phase(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      return;
    }
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows()
       << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

double hermiticity_defect(const Matrix& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

Matrix hermitian_part(const Matrix& h) { return 0.5 * (h + h.adjoint()); }

EigenDecomposition hermitian_eig(const Matrix& h, double herm_tol) {
  require_square(h, "hermitian_eig");
  const double defect = hermiticity_defect(h);
  if (defect > herm_tol) {
    std::ostringstream os;
    os << "hermitian_eig: matrix is not Hermitian (defect " << defect << ")";
    throw ValidationError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  const Eigen::Index n = h.rows();
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
    fix_phase(out.vectors.col(k));
  }
  return out;
}

double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

Matrix matrix_sqrt(const Matrix& p, double psd_tol) {
  auto eig = hermitian_eig(p, kHermTol);
  const double lmin = eig.values(eig.values.size() - 1);
  if (lmin < -psd_tol) {
    std::ostringstream os;
    os << "matrix_sqrt: operator is not PSD (smallest eigenvalue " << lmin
       << ")";
    throw DomainError(os.str());
  }
  RealVector s = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * s.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

Matrix pinv_sqrt(const Matrix& p, double rank_tol) {
  auto eig = hermitian_eig(p, kHermTol);
  const double cutoff = rank_tol * std::max(eig.values(0), 0.0);
  RealVector s(eig.values.size());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    s(k) = eig.values(k) > cutoff && eig.values(k) > 0.0
               ? 1.0 / std::sqrt(eig.values(k))
               : 0.0;
  return eig.vectors * s.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

Matrix inv_sqrt_full_rank(const Matrix& p, double rank_tol) {
  auto eig = hermitian_eig(p, kHermTol);
  const double lmin = eig.values(eig.values.size() - 1);
  if (!(lmin > rank_tol * std::max(eig.values(0), 0.0)) || lmin <= 0.0) {
    std::ostringstream os;
    os << "operator is not full rank (smallest eigenvalue " << lmin << ")";
    throw DomainError(os.str());
  }
  RealVector s = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * s.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

Matrix psd_projection(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  RealVector s = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * s.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix partial_trace(const Matrix& op, const BipartiteShape& shape,
                     Side side) {
  const int da = shape.dim_a, db = shape.dim_b;
  if (op.rows() != shape.total() || op.cols() != shape.total()) {
    std::ostringstream os;
    os << "partial_trace: operator is " << op.rows() << "x" << op.cols()
       << " but shape is " << da << "x" << db;
    throw DimensionError(os.str());
  }
  if (side == Side::A) {
    Matrix out = Matrix::Zero(db, db);
    for (int i = 0; i < da; ++i) out += op.block(i * db, i * db, db, db);
    return out;
  }
  Matrix out(da, da);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out(i, j) = op.block(i * db, j * db, db, db).trace();
  return out;
}

Matrix vec_to_op(const Vector& phi, const BipartiteShape& shape) {
  if (phi.size() != shape.total()) {
    std::ostringstream os;
    os << "vec_to_op: vector has length " << phi.size() << " but shape is "
       << shape.dim_a << "x" << shape.dim_b;
    throw DimensionError(os.str());
  }
  Matrix f(shape.dim_a, shape.dim_b);
  for (int m = 0; m < shape.dim_a; ++m)
    for (int k = 0; k < shape.dim_b; ++k) f(m, k) = phi(m * shape.dim_b + k);
  return f;
}

Vector op_to_vec(const Matrix& op) {
  Vector v(op.rows() * op.cols());
  for (Eigen::Index m = 0; m < op.rows(); ++m)
    for (Eigen::Index k = 0; k < op.cols(); ++k) v(m * op.cols() + k) = op(m, k);
  return v;
}

SchmidtDecomposition schmidt_decompose(const Vector& phi,
                                       const BipartiteShape& shape) {
  if (phi.norm() == 0.0) throw DomainError("schmidt_decompose: zero vector");
  Matrix f = vec_to_op(phi, shape);
  Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Index r = std::min(f.rows(), f.cols());
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU().leftCols(r);
  // F = sum_i c_i u_i v_i^*  <=>  phi = sum_i c_i u_i (x) conj(v_i).
  out.right = svd.matrixV().leftCols(r).conjugate();
  for (Eigen::Index i = 0; i < r; ++i) {
    // Move the phase freedom onto the left vector so results are stable.
    Vector u = out.left.col(i);
    Vector v = out.right.col(i);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (std::abs(v(k)) > 1e-12) {
        const cplx ph = std::conj(v(k)) / std::abs(v(k));
        v *= ph;
        u /= ph;
        break;
      }
    }
    out.left.col(i) = u;
    out.right.col(i) = v;
  }
  return out;
}

int schmidt_rank(const Vector& phi, const BipartiteShape& shape,
                 double rank_tol) {
  Matrix f = vec_to_op(phi, shape);
  return numerical_rank(f, rank_tol);
}

Vector purify(const Matrix& sigma) {
  auto eig = hermitian_eig(sigma, kHermTol);
  const Eigen::Index d = sigma.rows();
  Vector psi = Vector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double a = eig.values(k);
    if (a <= 0.0) continue;
    Vector e = eig.vectors.col(k);
    psi += std::sqrt(a) * kron(e, e);
  }
  return psi;
}

Matrix transpose_in_basis(const Matrix& m, const Matrix& basis) {
  return basis * (basis.adjoint() * m * basis).transpose() * basis.adjoint();
}

Matrix complete_basis(const Matrix& partial) {
  const Eigen::Index d = partial.rows(), r = partial.cols();
  if (r == d) return partial;
  Eigen::HouseholderQR<Matrix> qr(partial);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix out(d, d);
  out.leftCols(r) = partial;
  out.rightCols(d - r) = q.rightCols(d - r);
  return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::JacobiSVD<Matrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

double frob_distance(const Matrix& a, const Matrix& b) {
  return (a - b).norm();
}

int numerical_rank(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++r;
  return r;
}

Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }

}  // namespace povmc
