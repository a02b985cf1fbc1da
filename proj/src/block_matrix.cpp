#include "blockqd/block_matrix.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace blockqd {

BlockGrid::BlockGrid(std::size_t n, std::size_t p) : n_(n), p_(p) {
  if (n == 0 || p == 0)
    throw std::invalid_argument("BlockGrid: n and p must be positive");
  blocks_.assign(n * n, Matrix(p, p));
}

BlockGrid BlockGrid::identity(std::size_t n, std::size_t p) {
  BlockGrid g(n, p);
  for (std::size_t i = 0; i < n; ++i) g.set(i, i, Matrix::identity(p));
  return g;
}

const Matrix& BlockGrid::at(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw std::out_of_range("BlockGrid: index");
  return blocks_[i * n_ + j];
}

void BlockGrid::set(std::size_t i, std::size_t j, Matrix block) {
  if (i >= n_ || j >= n_) throw std::out_of_range("BlockGrid: index");
  if (block.rows() != p_ || block.cols() != p_)
    throw std::invalid_argument("BlockGrid: block order mismatch");
  blocks_[i * n_ + j] = std::move(block);
}

Matrix BlockGrid::flatten() const {
  Matrix out(n_ * p_, n_ * p_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const Matrix& b = blocks_[i * n_ + j];
      for (std::size_t r = 0; r < p_; ++r)
        for (std::size_t c = 0; c < p_; ++c)
          out(i * p_ + r, j * p_ + c) = b(r, c);
    }
  return out;
}

double BlockGrid::frobenius() const {
  double s = 0.0;
  for (const Matrix& b : blocks_) {
    const double f = b.frobenius();
    s += f * f;
  }
  return std::sqrt(s);
}

BlockGrid multiply(const BlockGrid& a, const BlockGrid& b) {
  if (a.n() != b.n() || a.block_order() != b.block_order())
    throw std::invalid_argument("BlockGrid: shape mismatch in product");
  const std::size_t n = a.n();
  BlockGrid out(n, a.block_order());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix acc(a.block_order(), a.block_order());
      for (std::size_t k = 0; k < n; ++k) acc += a.at(i, k) * b.at(k, j);
      out.set(i, j, std::move(acc));
    }
  return out;
}

double grid_trace(const BlockGrid& g) {
  double t = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const Matrix& b = g.at(i, i);
    for (std::size_t r = 0; r < g.block_order(); ++r) t += b(r, r);
  }
  return t;
}

LowerFactor::LowerFactor(std::size_t n, std::size_t p, std::vector<Matrix> e)
    : n(n), p(p), e(std::move(e)) {
  if (this->e.size() + 1 != n)
    throw std::invalid_argument("LowerFactor: expected n-1 subdiagonal blocks");
  for (const Matrix& b : this->e)
    if (b.rows() != p || b.cols() != p)
      throw std::invalid_argument("LowerFactor: block order mismatch");
}

BlockGrid LowerFactor::to_grid() const {
  BlockGrid g = BlockGrid::identity(n, p);
  for (std::size_t m = 0; m + 1 < n; ++m) g.set(m + 1, m, e[m]);
  return g;
}

UpperFactor::UpperFactor(std::size_t n, std::size_t p, std::vector<Matrix> q)
    : n(n), p(p), q(std::move(q)) {
  if (this->q.size() != n)
    throw std::invalid_argument("UpperFactor: expected n diagonal blocks");
  for (const Matrix& b : this->q)
    if (b.rows() != p || b.cols() != p)
      throw std::invalid_argument("UpperFactor: block order mismatch");
}

BlockGrid UpperFactor::to_grid() const {
  BlockGrid g(n, p);
  for (std::size_t m = 0; m < n; ++m) {
    g.set(m, m, q[m]);
    if (m + 1 < n) g.set(m, m + 1, Matrix::identity(p));
  }
  return g;
}

BlockGrid assemble_j(std::span<const LowerFactor> lowers,
                     const UpperFactor& upper) {
  if (lowers.empty())
    throw std::invalid_argument("assemble_j: need at least one lower factor");
  for (const LowerFactor& l : lowers)
    if (l.n != upper.n || l.p != upper.p)
      throw std::invalid_argument("assemble_j: factor shape mismatch");
  BlockGrid acc = lowers[0].to_grid();
  for (std::size_t i = 1; i < lowers.size(); ++i)
    acc = multiply(acc, lowers[i].to_grid());
  return multiply(acc, upper.to_grid());
}

}  // namespace blockqd
