#include "povmc/random.hpp"

#include <cmath>

namespace povmc {

Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = cplx(n01(rng), n01(rng));
  return g;
}

Matrix haar_unitary(int d, Rng& rng) {
  Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    if (std::abs(rk) > 0.0) q.col(k) *= rk / std::abs(rk);
  }
  return q;
}

Vector haar_vector(int d, Rng& rng) {
  Vector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

Vector random_schmidt_rank_vector(const BipartiteShape& shape, int rank,
                                  Rng& rng) {
  Matrix f = ginibre(shape.dim_a, rank, rng) * ginibre(rank, shape.dim_b, rng);
  Vector v = op_to_vec(f);
  return v / v.norm();
}

Matrix random_density(int d, Rng& rng) {
  Matrix g = ginibre(d, d, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

Matrix random_faithful_density(int d, double floor, Rng& rng) {
  Matrix rho = random_density(d, rng);
  const double w = std::min(1.0, floor * d);
  return (1.0 - w) * rho + w * Matrix::Identity(d, d) / double(d);
}

std::vector<Matrix> random_povm(int d, int outcomes, Rng& rng) {
  std::vector<Matrix> parts;
  Matrix total = Matrix::Zero(d, d);
  for (int a = 0; a < outcomes; ++a) {
    Matrix g = ginibre(d, d, rng);
    parts.push_back(g * g.adjoint());
    total += parts.back();
  }
  Matrix t = inv_sqrt_full_rank(hermitian_part(total));
  for (auto& p : parts) p = hermitian_part(t * p * t);
  return parts;
}

std::vector<Matrix> random_projective(int d, Rng& rng) {
  Matrix u = haar_unitary(d, rng);
  std::vector<Matrix> out;
  for (int k = 0; k < d; ++k) out.push_back(outer(u.col(k), u.col(k)));
  return out;
}

std::vector<double> random_distribution(int outcomes, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(outcomes);
  double s = 0.0;
  for (auto& x : p) s += (x = e(rng));
  for (auto& x : p) x /= s;
  return p;
}

std::vector<Matrix> random_kraus(int d_in, int d_out, int count, int max_rank,
                                 Rng& rng) {
  std::vector<Matrix> ks;
  Matrix total = Matrix::Zero(d_in, d_in);
  for (int k = 0; k < count; ++k) {
    const int r = std::min({max_rank, d_in, d_out});
    Matrix kk = ginibre(d_out, r, rng) * ginibre(r, d_in, rng);
    total += kk.adjoint() * kk;
    ks.push_back(std::move(kk));
  }
  // Right-multiplying by total^{-1/2} keeps every rank and makes the set
  // trace preserving.
  Matrix t = inv_sqrt_full_rank(hermitian_part(total));
  for (auto& kk : ks) kk = kk * t;
  return ks;
}

}  // namespace povmc
