#include "blockqd/quasidet.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace blockqd {

namespace {

std::vector<std::size_t> indices_without(std::size_t count, std::size_t skip) {
  std::vector<std::size_t> idx;
  idx.reserve(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    if (i != skip) idx.push_back(i);
  return idx;
}

}  // namespace

QuasiGrid::QuasiGrid(std::size_t rows, std::size_t cols, std::size_t p)
    : rows_(rows), cols_(cols), p_(p) {
  if (rows == 0 || cols == 0 || p == 0)
    throw std::invalid_argument("QuasiGrid: dimensions must be positive");
  blocks_.assign(rows * cols, Matrix(p, p));
}

QuasiGrid QuasiGrid::from_scalar(const Matrix& m) {
  QuasiGrid g(m.rows(), m.cols(), 1);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Matrix b(1, 1);
      b(0, 0) = m(i, j);
      g.set(i, j, std::move(b));
    }
  return g;
}

const Matrix& QuasiGrid::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("QuasiGrid: index");
  return blocks_[i * cols_ + j];
}

void QuasiGrid::set(std::size_t i, std::size_t j, Matrix block) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("QuasiGrid: index");
  if (block.rows() != p_ || block.cols() != p_)
    throw std::invalid_argument("QuasiGrid: block order mismatch");
  blocks_[i * cols_ + j] = std::move(block);
}

QuasiGrid QuasiGrid::submatrix(std::span<const std::size_t> row_idx,
                               std::span<const std::size_t> col_idx) const {
  QuasiGrid out(row_idx.size(), col_idx.size(), p_);
  for (std::size_t i = 0; i < row_idx.size(); ++i)
    for (std::size_t j = 0; j < col_idx.size(); ++j)
      out.set(i, j, at(row_idx[i], col_idx[j]));
  return out;
}

Matrix QuasiGrid::flatten() const {
  Matrix out(rows_ * p_, cols_ * p_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      const Matrix& b = blocks_[i * cols_ + j];
      for (std::size_t r = 0; r < p_; ++r)
        for (std::size_t c = 0; c < p_; ++c)
          out(i * p_ + r, j * p_ + c) = b(r, c);
    }
  return out;
}

Matrix quasidet(const QuasiGrid& a, std::size_t box_row, std::size_t box_col,
                double rcond_floor) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("quasidet: grid must be square");
  if (box_row >= a.rows() || box_col >= a.cols())
    throw std::out_of_range("quasidet: boxed position out of range");

  const std::size_t n = a.rows();
  const std::size_t p = a.block_order();
  if (n == 1) return a.at(0, 0);

  const auto rows = indices_without(n, box_row);
  const auto cols = indices_without(n, box_col);

  const Matrix minor = a.submatrix(rows, cols).flatten();

  // row strip r_i^j and column strip c_j^i around the boxed entry
  Matrix row_strip(p, (n - 1) * p);
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const Matrix& b = a.at(box_row, cols[j]);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) row_strip(r, j * p + c) = b(r, c);
  }
  Matrix col_strip((n - 1) * p, p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Matrix& b = a.at(rows[i], box_col);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) col_strip(i * p + r, c) = b(r, c);
  }

  const LuFactorization f = lu_factor(minor);
  if (f.singular || f.rcond_estimate < rcond_floor)
    throw SingularMinorError(
        "quasidet: minor numerically singular (rcond " +
            std::to_string(f.rcond_estimate) + ")",
        f.rcond_estimate);
  return a.at(box_row, box_col) - row_strip * lu_solve(f, col_strip);
}

double jacobi_identity_residual(const QuasiGrid& a, double rcond_floor,
                                double* scale) {
  if (a.rows() != a.cols() || a.rows() < 2)
    throw std::invalid_argument(
        "jacobi_identity_residual: need a square grid of size >= 2");
  const std::size_t n = a.rows();

  std::vector<std::size_t> head(n - 2);
  std::iota(head.begin(), head.end(), std::size_t{0});
  auto with = [&head](std::size_t extra) {
    std::vector<std::size_t> idx = head;
    idx.push_back(extra);
    return idx;
  };
  const auto rows_f = with(n - 2), rows_h = with(n - 1);
  const auto cols_f = with(n - 2), cols_g = with(n - 1);

  const Matrix lhs = quasidet(a, n - 1, n - 1, rcond_floor);
  const Matrix t1 =
      quasidet(a.submatrix(rows_h, cols_g), n - 2, n - 2, rcond_floor);
  const Matrix t2 =
      quasidet(a.submatrix(rows_h, cols_f), n - 2, n - 2, rcond_floor);
  const Matrix t3 =
      quasidet(a.submatrix(rows_f, cols_f), n - 2, n - 2, rcond_floor);
  const Matrix t4 =
      quasidet(a.submatrix(rows_f, cols_g), n - 2, n - 2, rcond_floor);
  const Matrix rhs = t1 - t2 * solve(t3, t4, rcond_floor);

  if (scale != nullptr) *scale = lhs.frobenius() + rhs.frobenius() + 1.0;
  return (lhs - rhs).frobenius();
}

std::pair<double, double> homological_residuals(const QuasiGrid& a,
                                                double rcond_floor,
                                                double* scale) {
  if (a.rows() != a.cols() || a.rows() < 2)
    throw std::invalid_argument(
        "homological_residuals: need a square grid of size >= 2");
  const std::size_t n = a.rows();
  const std::size_t p = a.block_order();

  const Matrix corner = quasidet(a, n - 1, n - 1, rcond_floor);

  // row relation: boxed (n-1, n-2) against the grid whose last row is
  // (0, ..., [0], I)
  QuasiGrid row_var = a;
  for (std::size_t j = 0; j < n; ++j) row_var.set(n - 1, j, Matrix(p, p));
  row_var.set(n - 1, n - 1, Matrix::identity(p));
  const Matrix lhs_row = quasidet(a, n - 1, n - 2, rcond_floor);
  const Matrix rhs_row =
      corner * quasidet(row_var, n - 1, n - 2, rcond_floor);

  // column relation: boxed (n-2, n-1) against the grid whose last column is
  // (0, ..., [0], I)^T
  QuasiGrid col_var = a;
  for (std::size_t i = 0; i < n; ++i) col_var.set(i, n - 1, Matrix(p, p));
  col_var.set(n - 1, n - 1, Matrix::identity(p));
  const Matrix lhs_col = quasidet(a, n - 2, n - 1, rcond_floor);
  const Matrix rhs_col =
      quasidet(col_var, n - 2, n - 1, rcond_floor) * corner;

  if (scale != nullptr)
    *scale = lhs_row.frobenius() + rhs_row.frobenius() + lhs_col.frobenius() +
             rhs_col.frobenius() + 1.0;
  return {(lhs_row - rhs_row).frobenius(), (lhs_col - rhs_col).frobenius()};
}

std::vector<Matrix> solve_left(const QuasiGrid& a,
                               std::span<const Matrix> rhs,
                               double rcond_floor) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("solve_left: grid must be square");
  const std::size_t n = a.rows();
  if (rhs.size() != n)
    throw std::invalid_argument("solve_left: rhs size mismatch");

  std::vector<Matrix> x;
  x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix xi(a.block_order(), a.block_order());
    for (std::size_t j = 0; j < n; ++j)
      xi += solve(quasidet(a, j, i, rcond_floor), rhs[j], rcond_floor);
    x.push_back(std::move(xi));
  }
  return x;
}

}  // namespace blockqd
