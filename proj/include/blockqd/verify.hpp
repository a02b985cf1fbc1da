#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace blockqd {

// Outcome of one randomized identity check: the worst relative residual
// seen across all trials against the tolerance it must stay under.
struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;

  bool pass() const { return max_residual <= tolerance; }
};

// Non-commutative Jacobi identity, homological relations, and the
// quasi-determinant linear-solve agreement, over random well-conditioned
// grids (diagonal blocks boosted by 3I), p in {1,2,3}.
std::vector<IdentityCheck> verify_quasidet(std::size_t trials,
                                           std::uint64_t seed);

// Bilinear-form structure (quasi-symmetry, bimodule linearity),
// bi-orthogonality, Christoffel/Geronimus transformations for both
// families, both recurrence relations, the tau identity, and the agreement
// of the two family-construction routes, over random SPD-weight measures,
// p in {1,2}, theta in {1,2,3}.
std::vector<IdentityCheck> verify_moments(std::size_t trials,
                                          std::uint64_t seed);

// Lattice-step against moment-oracle equivalence for both lattices (three
// consecutive steps), factor compatibility, and the similarity conjugation
// property of a step, over measures with exactly n atoms, n in {2,3,4}.
std::vector<IdentityCheck> verify_lattice(std::size_t trials,
                                          std::uint64_t seed);

}  // namespace blockqd
