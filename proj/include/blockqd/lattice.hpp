#pragma once

#include <cstddef>
#include <vector>

#include "blockqd/block_matrix.hpp"
#include "blockqd/matrix.hpp"
#include "blockqd/moments.hpp"

namespace blockqd {

// State of the finite-dimensional hungry Toda-II system. q holds
// q_1..q_n at level alpha; e[k][m-1] holds e_m at level alpha+k for the
// theta buffered layers k = 0..theta-1. The boundary blocks e_0 and e_n are
// implicitly zero.
struct TodaIIState {
  std::size_t theta = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  long alpha = 0;
  std::vector<Matrix> q;
  std::vector<std::vector<Matrix>> e;

  void validate() const;
};

// Advance one level: q moves to alpha+1, the consumed oldest e layer (level
// alpha) is replaced by the produced level alpha+theta. One inner
// i-iteration of the sweep loop. Throws BreakdownError when a pivot
// q_{m}^{(alpha+1)} fails the rcond floor.
TodaIIState toda2_step(const TodaIIState& s,
                       double rcond_floor = kDefaultRcondFloor);

// Toda-I analogue, used for verification only. omega levels couple in
// strides of theta, so omega is the buffered variable here: omega[k][m-1]
// holds omega_m at level alpha+k, epsilon sits at the single level alpha.
// A step replaces the oldest omega layer by level alpha+theta and advances
// epsilon to alpha+1.
struct TodaIState {
  std::size_t theta = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  long alpha = 0;
  std::vector<std::vector<Matrix>> omega;
  std::vector<Matrix> epsilon;

  void validate() const;
};

TodaIState toda1_step(const TodaIState& s,
                      double rcond_floor = kDefaultRcondFloor);

// Frobenius residual of R^(a) L^(a) - L^(a+theta) R^(a+1); the level
// (a+1, a+theta) factors come from one internal step. `scale` (optional)
// receives the Frobenius norm of the assembled J at the state's level.
double compatibility_residual(const TodaIIState& s,
                              double rcond_floor = kDefaultRcondFloor,
                              double* scale = nullptr);

// J at the state's level, L^(a) ... L^(a+theta-1) R^(a).
BlockGrid assemble(const TodaIIState& s);

// Initial states with every variable taken from H ratios of a measure.
// Exact zero boundary needs the measure to carry exactly n atoms.
TodaIIState toda2_from_measure(const MomentTable& t, std::size_t n,
                               long alpha = 0,
                               double rcond_floor = kDefaultRcondFloor);
TodaIState toda1_from_measure(const MomentTable& t, std::size_t n,
                              long alpha = 0,
                              double rcond_floor = kDefaultRcondFloor);

}  // namespace blockqd
