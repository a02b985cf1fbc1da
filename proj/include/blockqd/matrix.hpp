#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blockqd/errors.hpp"

namespace blockqd {

inline constexpr double kDefaultRcondFloor = 1e-12;

// Dense row-major matrix of doubles. Square instances are the ring elements
// ("blocks") of R^{p x p} that every lattice variable and polynomial
// coefficient lives over; rectangular ones appear only in flattened
// quasi-determinant strips. Value semantics throughout.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  // Block order p for square matrices.
  std::size_t order() const;
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }

  bool all_finite() const noexcept;

  Matrix transposed() const;
  double frobenius() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double a);

  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
  friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
  friend Matrix operator*(Matrix lhs, double a) { return lhs *= a; }
  friend Matrix operator*(double a, Matrix rhs) { return rhs *= a; }
  friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
  friend Matrix operator-(Matrix m);

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Partial-pivoted LU of a square matrix, with the cheap conditioning
// estimate min|pivot| / max|pivot| gathered during elimination.
struct LuFactorization {
  Matrix lu;
  std::vector<std::size_t> perm;
  double rcond_estimate = 0.0;
  bool singular = false;
};

LuFactorization lu_factor(Matrix a);
Matrix lu_solve(const LuFactorization& f, const Matrix& rhs);

// Solve a x = rhs; throws SingularError when the rcond estimate of `a`
// falls below rcond_floor.
Matrix solve(const Matrix& a, const Matrix& rhs,
             double rcond_floor = kDefaultRcondFloor);

// Inverse via pivoted elimination with the same rcond gate.
Matrix inverse(const Matrix& a, double rcond_floor = kDefaultRcondFloor);

}  // namespace blockqd
