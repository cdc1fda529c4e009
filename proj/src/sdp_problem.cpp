#include <cmath>
#include <sstream>

#include "povmc/errors.hpp"
#include "povmc/sdp.hpp"

namespace povmc {

int SdpProblem::add_block(std::string label, int dim, bool real) {
  if (dim < 1) throw DimensionError("SdpProblem: block dimension must be positive");
  blocks_.push_back({std::move(label), dim, real});
  return static_cast<int>(blocks_.size()) - 1;
}

int SdpProblem::add_constraint(std::vector<SdpTerm> terms, double rhs) {
  for (const auto& t : terms) {
    if (t.block < 0 || t.block >= int(blocks_.size()))
      throw DimensionError("SdpProblem: constraint references an unknown block");
    const int n = blocks_[t.block].dim;
    if (t.coeff.rows() != n || t.coeff.cols() != n) {
      std::ostringstream os;
      os << "SdpProblem: coefficient for block '" << blocks_[t.block].label
         << "' is " << t.coeff.rows() << "x" << t.coeff.cols() << ", expected "
         << n << "x" << n;
      throw DimensionError(os.str());
    }
  }
  constraints_.push_back({std::move(terms), rhs});
  return static_cast<int>(constraints_.size()) - 1;
}

std::vector<Matrix> hermitian_basis(int m) {
  std::vector<Matrix> out;
  out.reserve(std::size_t(m) * m);
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < m; ++k) {
    Matrix e = Matrix::Zero(m, m);
    e(k, k) = 1.0;
    out.push_back(std::move(e));
  }
  for (int k = 0; k < m; ++k) {
    for (int l = k + 1; l < m; ++l) {
      Matrix s = Matrix::Zero(m, m), a = Matrix::Zero(m, m);
      s(k, l) = s(l, k) = r;
      a(k, l) = cplx(0, r);
      a(l, k) = cplx(0, -r);
      out.push_back(std::move(s));
      out.push_back(std::move(a));
    }
  }
  return out;
}

Matrix dual_matrix(const std::vector<double>& y, int first, int m) {
  auto basis = hermitian_basis(m);
  Matrix w = Matrix::Zero(m, m);
  for (std::size_t q = 0; q < basis.size(); ++q) w += y.at(first + q) * basis[q];
  return w;
}

int SdpProblem::add_matrix_equality(
    const std::vector<std::pair<int, AdjointMap>>& terms, const Matrix& target) {
  const int m = static_cast<int>(target.rows());
  const auto basis = hermitian_basis(m);
  int first = -1;
  for (const auto& b : basis) {
    std::vector<SdpTerm> row;
    for (const auto& [block, adj] : terms) row.push_back({block, adj(b)});
    const int id = add_constraint(std::move(row), (b * target).trace().real());
    if (first < 0) first = id;
  }
  return first;
}

int SdpProblem::add_sum_equality(const std::vector<int>& blocks,
                                 const Matrix& target) {
  std::vector<std::pair<int, AdjointMap>> terms;
  for (int b : blocks) terms.emplace_back(b, [](const Matrix& m) { return m; });
  return add_matrix_equality(terms, target);
}

void SdpProblem::set_objective(std::vector<SdpTerm> terms) {
  for (const auto& t : terms)
    if (t.block < 0 || t.block >= int(blocks_.size()) ||
        t.coeff.rows() != blocks_[t.block].dim)
      throw DimensionError("SdpProblem: objective term does not match its block");
  objective_ = std::move(terms);
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::numerical_trouble: return "numerical_trouble";
  }
  return "?";
}

}  // namespace povmc
