#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blockqd/matrix.hpp"

namespace blockqd {

// n x n grid of p x p blocks; houses the assembled operators and the dense
// intermediates of their products.
class BlockGrid {
public:
  BlockGrid(std::size_t n, std::size_t p);
  static BlockGrid identity(std::size_t n, std::size_t p);

  std::size_t n() const noexcept { return n_; }
  std::size_t block_order() const noexcept { return p_; }

  const Matrix& at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, Matrix block);

  // (n p) x (n p) scalar matrix.
  Matrix flatten() const;

  double frobenius() const;

private:
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<Matrix> blocks_;
};

BlockGrid multiply(const BlockGrid& a, const BlockGrid& b);

// Sum of scalar diagonal entries; similarity-invariant across lattice steps.
double grid_trace(const BlockGrid& g);

// Unit block lower bidiagonal factor: identity diagonal, e_1..e_{n-1} on the
// first block subdiagonal.
struct LowerFactor {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<Matrix> e;

  LowerFactor(std::size_t n, std::size_t p, std::vector<Matrix> e);
  BlockGrid to_grid() const;
};

// Block upper bidiagonal factor: q_1..q_n on the diagonal, identity blocks
// on the first block superdiagonal.
struct UpperFactor {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<Matrix> q;

  UpperFactor(std::size_t n, std::size_t p, std::vector<Matrix> q);
  BlockGrid to_grid() const;
};

// Dense product L^(0) ... L^(theta-1) R: block lower Hessenberg with identity
// first block superdiagonal and at most theta nonzero block subdiagonals.
BlockGrid assemble_j(std::span<const LowerFactor> lowers,
                     const UpperFactor& upper);

}  // namespace blockqd
