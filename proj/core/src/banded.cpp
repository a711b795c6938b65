#include "cqed/banded.hpp"

#include <algorithm>
#include <cstdlib>

namespace cqed {

BandedOperator::BandedOperator(int dim) : dim_(dim) {
  for (auto& d : diagonals_) d = Vector::Zero(dim);
}

BandedOperator BandedOperator::from_dense(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("banded operator must be square");
  BandedOperator b(static_cast<int>(m.rows()));
  for (int i = 0; i < b.dim_; ++i)
    for (int j = 0; j < b.dim_; ++j) {
      if (m(i, j) == Complex(0.0, 0.0)) continue;
      const int off = j - i;
      if (std::abs(off) > kMaxOffset) throw DimensionError("operator has entries outside the -2..2 band");
      b.diagonals_[off + kMaxOffset](i) = m(i, j);
    }
  return b;
}

Complex BandedOperator::entry(int row, int offset) const {
  const int col = row + offset;
  if (std::abs(offset) > kMaxOffset || row < 0 || row >= dim_ || col < 0 || col >= dim_) return {};
  return diagonals_[offset + kMaxOffset](row);
}

Matrix BandedOperator::to_dense() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (int off = -kMaxOffset; off <= kMaxOffset; ++off)
    for (int i = std::max(0, -off); i < std::min(dim_, dim_ - off); ++i) m(i, i + off) = entry(i, off);
  return m;
}

BandedOperator BandedOperator::adjoint() const {
  BandedOperator b(dim_);
  for (int off = -kMaxOffset; off <= kMaxOffset; ++off)
    for (int i = std::max(0, -off); i < std::min(dim_, dim_ - off); ++i)
      b.diagonals_[-off + kMaxOffset](i + off) = std::conj(entry(i, off));
  return b;
}

void BandedOperator::add_left_product(const Matrix& x, Complex scale, Matrix& out) const {
  const Eigen::Index cols = x.cols();
  for (int off = -kMaxOffset; off <= kMaxOffset; ++off) {
    const Vector& d = diagonals_[off + kMaxOffset];
    const int lo = std::max(0, -off);
    const int hi = std::min(dim_, dim_ - off);
    if (hi <= lo) continue;
    const Vector coeff = scale * d.segment(lo, hi - lo);
    if (coeff.isZero(0.0)) continue;
    for (Eigen::Index j = 0; j < cols; ++j)
      out.col(j).segment(lo, hi - lo).array() += coeff.array() * x.col(j).segment(lo + off, hi - lo).array();
  }
}

void BandedOperator::add_right_product(const Matrix& x, Complex scale, Matrix& out) const {
  // (x B)(:, j) = sum_off x(:, j - off) * B(j - off, j)
  for (int off = -kMaxOffset; off <= kMaxOffset; ++off) {
    const Vector& d = diagonals_[off + kMaxOffset];
    const int lo = std::max(0, -off);
    const int hi = std::min(dim_, dim_ - off);
    for (int m = lo; m < hi; ++m) {
      const Complex c = d(m);
      if (c == Complex(0.0, 0.0)) continue;
      out.col(m + off) += (scale * c) * x.col(m);
    }
  }
}

Matrix BandedOperator::left(const Matrix& x) const {
  Matrix out = Matrix::Zero(dim_, x.cols());
  add_left_product(x, 1.0, out);
  return out;
}

Matrix BandedOperator::right(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), dim_);
  add_right_product(x, 1.0, out);
  return out;
}

Complex BandedOperator::trace_product(const Matrix& x) const {
  // tr(B x) = sum_i sum_off B(i, i + off) x(i + off, i)
  Complex t{};
  for (int off = -kMaxOffset; off <= kMaxOffset; ++off)
    for (int i = std::max(0, -off); i < std::min(dim_, dim_ - off); ++i)
      t += diagonals_[off + kMaxOffset](i) * x(i + off, i);
  return t;
}

}  // namespace cqed
