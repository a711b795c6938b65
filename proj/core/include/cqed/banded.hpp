#pragma once

#include <array>

#include "cqed/hilbert.hpp"

namespace cqed {

/// Matrix whose non-zeros lie on diagonals -2..2 of the joint basis.
///
/// With the field (x) atom ordering every generator of the cavity model
/// (a, a^dagger, sigma, their products up to a^dagger sigma) fits in this
/// band, so products with a dense density matrix cost O(d^2) instead of O(d^3).
class BandedOperator {
 public:
  static constexpr int kMaxOffset = 2;

  explicit BandedOperator(int dim = 0);

  /// Throws DimensionError if `m` has entries outside the band.
  static BandedOperator from_dense(const Matrix& m);

  int dim() const { return dim_; }

  /// Entry (row, row + offset); zero outside the matrix.
  Complex entry(int row, int offset) const;

  Matrix to_dense() const;
  BandedOperator adjoint() const;

  /// out += scale * (B x)
  void add_left_product(const Matrix& x, Complex scale, Matrix& out) const;
  /// out += scale * (x B)
  void add_right_product(const Matrix& x, Complex scale, Matrix& out) const;

  Matrix left(const Matrix& x) const;
  Matrix right(const Matrix& x) const;

  /// tr(B x)
  Complex trace_product(const Matrix& x) const;

 private:
  int dim_;
  // diagonals_[offset + 2](row) = B(row, row + offset)
  std::array<Vector, 2 * kMaxOffset + 1> diagonals_;
};

}  // namespace cqed
