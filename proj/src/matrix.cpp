#include "blockqd/matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "blockqd/kernels.hpp"

namespace blockqd {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw std::invalid_argument("Matrix: data size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::size_t Matrix::order() const {
  if (!square()) throw std::invalid_argument("Matrix: order() on non-square");
  return rows_;
}

bool Matrix::all_finite() const noexcept {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius() const {
  return std::sqrt(kernels::sum_squares(data_.size(), data_.data()));
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("Matrix: shape mismatch in +=");
  kernels::add(data_.size(), data_.data(), rhs.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw std::invalid_argument("Matrix: shape mismatch in -=");
  kernels::sub(data_.size(), data_.data(), rhs.data_.data(), data_.data());
  return *this;
}

Matrix& Matrix::operator*=(double a) {
  kernels::scale(data_.size(), a, data_.data());
  return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
  if (lhs.cols_ != rhs.rows_)
    throw std::invalid_argument("Matrix: shape mismatch in product");
  Matrix out(lhs.rows_, rhs.cols_);
  kernels::matmul_accum(lhs.rows_, lhs.cols_, rhs.cols_, lhs.data(),
                        rhs.data(), out.data());
  return out;
}

Matrix operator-(Matrix m) {
  kernels::scale(m.data_.size(), -1.0, m.data());
  return m;
}

LuFactorization lu_factor(Matrix a) {
  const std::size_t n = a.order();
  LuFactorization f;
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  double min_pivot = 0.0, max_pivot = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot_row = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        pivot_row = r;
      }
    }
    if (pivot_row != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a(col, j), a(pivot_row, j));
      std::swap(f.perm[col], f.perm[pivot_row]);
    }
    const double pivot = a(col, col);
    const double ap = std::abs(pivot);
    if (col == 0) {
      min_pivot = max_pivot = ap;
    } else {
      min_pivot = std::min(min_pivot, ap);
      max_pivot = std::max(max_pivot, ap);
    }
    if (pivot == 0.0) {
      f.singular = true;
      continue;
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / pivot;
      a(r, col) = factor;
      if (factor != 0.0)
        kernels::axpy(n - col - 1, -factor, &a(col, col + 1), &a(r, col + 1));
    }
  }
  f.rcond_estimate =
      (f.singular || max_pivot == 0.0) ? 0.0 : min_pivot / max_pivot;
  f.lu = std::move(a);
  return f;
}

Matrix lu_solve(const LuFactorization& f, const Matrix& rhs) {
  const std::size_t n = f.lu.order();
  if (rhs.rows() != n)
    throw std::invalid_argument("lu_solve: rhs row count mismatch");
  const std::size_t m = rhs.cols();

  Matrix x(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) x(i, j) = rhs(f.perm[i], j);

  // forward: L y = P rhs (unit lower triangle stored below the diagonal)
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) {
      const double l = f.lu(i, k);
      if (l != 0.0) kernels::axpy(m, -l, &x(k, 0), &x(i, 0));
    }
  // backward: U x = y
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double u = f.lu(ii, k);
      if (u != 0.0) kernels::axpy(m, -u, &x(k, 0), &x(ii, 0));
    }
    kernels::scale(m, 1.0 / f.lu(ii, ii), &x(ii, 0));
  }
  return x;
}

Matrix solve(const Matrix& a, const Matrix& rhs, double rcond_floor) {
  const LuFactorization f = lu_factor(a);
  if (f.singular || f.rcond_estimate < rcond_floor)
    throw SingularError("solve: matrix numerically singular (rcond " +
                            std::to_string(f.rcond_estimate) + ")",
                        f.rcond_estimate);
  return lu_solve(f, rhs);
}

Matrix inverse(const Matrix& a, double rcond_floor) {
  return solve(a, Matrix::identity(a.order()), rcond_floor);
}

}  // namespace blockqd
