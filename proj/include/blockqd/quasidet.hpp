#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "blockqd/matrix.hpp"

namespace blockqd {

// Rectangular grid of p x p blocks over which quasi-determinants are taken.
// Scalar grids are the p = 1 case.
class QuasiGrid {
public:
  QuasiGrid(std::size_t rows, std::size_t cols, std::size_t p);

  // p = 1 grid mirroring a scalar matrix.
  static QuasiGrid from_scalar(const Matrix& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t block_order() const noexcept { return p_; }

  const Matrix& at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Matrix block);

  QuasiGrid submatrix(std::span<const std::size_t> row_idx,
                      std::span<const std::size_t> col_idx) const;
  Matrix flatten() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t p_ = 0;
  std::vector<Matrix> blocks_;
};

// |A|_{i,j} = a_{i,j} - r_i^j (A^{i,j})^{-1} c_j^i, evaluated through one
// dense pivoted solve against the flattened minor. Indices are 0-based.
// Throws SingularMinorError when the minor fails the rcond floor.
Matrix quasidet(const QuasiGrid& a, std::size_t box_row, std::size_t box_col,
                double rcond_floor = kDefaultRcondFloor);

// Frobenius residual of the non-commutative Jacobi identity applied to the
// last two rows and columns of a square grid (rows >= 2). If `scale` is
// non-null it receives ||LHS||_F + ||RHS||_F + 1 for relative comparisons.
double jacobi_identity_residual(const QuasiGrid& a,
                                double rcond_floor = kDefaultRcondFloor,
                                double* scale = nullptr);

// Residuals of the two homological relations tying the boxed positions
// (last row, second-to-last column) and (second-to-last row, last column)
// to the boxed-corner quasi-determinant.
std::pair<double, double> homological_residuals(
    const QuasiGrid& a, double rcond_floor = kDefaultRcondFloor,
    double* scale = nullptr);

// Solution of sum_j a_{i,j} x_j = rhs_i through the quasi-determinant
// inversion formula x_i = sum_j |A|_{j,i}^{-1} rhs_j. All n^2
// quasi-determinants must be well defined and invertible.
std::vector<Matrix> solve_left(const QuasiGrid& a,
                               std::span<const Matrix> rhs,
                               double rcond_floor = kDefaultRcondFloor);

}  // namespace blockqd
