#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "blockqd/matrix.hpp"
#include "blockqd/quasidet.hpp"

namespace blockqd {

// Finite list of atoms x_i with symmetric positive definite p x p weights;
// every pairing against it is a finite sum, so the identities below are
// checkable to machine precision.
struct DiscreteMeasure {
  std::size_t p = 0;
  std::vector<double> nodes;
  std::vector<Matrix> weights;

  // Throws std::invalid_argument on shape problems, non-finite or repeated
  // nodes, or weights that fail the symmetric positive definite check.
  void validate() const;

  // Heuristic node-count sufficiency for building families up to degree n;
  // moment-grid invertibility is still checked at use sites.
  bool supports_degree(std::size_t n, std::size_t theta) const {
    return nodes.size() >= n * std::max<std::size_t>(1, theta) + 1;
  }
};

// Moments m_gamma = sum_i x_i^gamma W_i of a measure, cached lazily.
// Reads are safe from multiple threads.
class MomentTable {
public:
  MomentTable(DiscreteMeasure measure, std::size_t theta);

  const DiscreteMeasure& measure() const noexcept { return measure_; }
  std::size_t theta() const noexcept { return theta_; }
  std::size_t block_order() const noexcept { return measure_.p; }

  Matrix moment(long gamma) const;

private:
  DiscreteMeasure measure_;
  std::size_t theta_;
  mutable std::mutex mutex_;
  mutable std::map<long, Matrix> cache_;
};

// Matrix polynomial sum_k coeff[k] x^k; coefficient blocks act from the left.
using BlockPoly = std::vector<Matrix>;

Matrix poly_eval(const BlockPoly& f, double x);
// f(x) * x^k
BlockPoly poly_shift(const BlockPoly& f, std::size_t k);
BlockPoly poly_left_mul(const Matrix& l, const BlockPoly& f);
BlockPoly poly_add(const BlockPoly& f, const BlockPoly& g);
BlockPoly poly_sub(const BlockPoly& f, const BlockPoly& g);

// <f, g>_theta^alpha = sum_i f(x_i) x_i^alpha W_i g(x_i^theta)^T.
Matrix bilinear(const BlockPoly& f, const BlockPoly& g, long alpha,
                const MomentTable& t);

// (n+1) x (n+1) block grid with entries m_{alpha + i + j theta}.
QuasiGrid moment_grid(std::size_t n, long alpha, const MomentTable& t);

// Normalization factor H_n^(alpha): boxed-corner quasi-determinant of the
// moment grid. SingularMinorError means the moment condition fails there.
Matrix normalization_h(std::size_t n, long alpha, const MomentTable& t,
                       double rcond_floor = kDefaultRcondFloor);

enum class FamilyKind { P, Q };

// Monic bi-orthogonal family, all degrees 0..n at one level alpha.
struct PolynomialFamily {
  FamilyKind kind = FamilyKind::P;
  long alpha = 0;
  std::vector<BlockPoly> polys;

  std::size_t max_degree() const { return polys.size() - 1; }
  const BlockPoly& operator[](std::size_t degree) const {
    return polys.at(degree);
  }
};

// Families built by solving the defining orthogonality system through
// solve_left (the quasi-determinant route is family_poly_via_quasidet).
PolynomialFamily build_family(FamilyKind kind, std::size_t n, long alpha,
                              const MomentTable& t,
                              double rcond_floor = kDefaultRcondFloor);

// Independent construction: expand the boxed quasi-determinant expression
// with one dense flattened solve. Used to cross-check build_family.
BlockPoly family_poly_via_quasidet(FamilyKind kind, std::size_t n, long alpha,
                                   const MomentTable& t,
                                   double rcond_floor = kDefaultRcondFloor);

// max_{a != b} ||<P_a, Q_b>||_F + max_a ||<P_a, Q_a> - H_a||_F over the
// degrees both families carry.
double biorthogonality_residual(const PolynomialFamily& pfam,
                                const PolynomialFamily& qfam,
                                const MomentTable& t,
                                double rcond_floor = kDefaultRcondFloor);

// The four lattice variables as H ratios, for 1-based index n >= 1:
//   q_n = ((H_{n-1}^(a))^{-1} H_{n-1}^(a+theta))^T
//   e_n = ((H_{n-1}^(a+1))^{-1} H_n^(a))^T
//   omega_n   = H_{n-1}^(a+1) (H_{n-1}^(a))^{-1}
//   epsilon_n = H_n^(a) (H_{n-1}^(a+theta))^{-1}
// The e/epsilon ratios reach one degree higher than q/omega, so they exist
// only up to index n-1 on a measure with exactly n atoms; the helpers keep
// the two groups separable.
Matrix q_coefficient(std::size_t n, long alpha, const MomentTable& t,
                     double rcond_floor = kDefaultRcondFloor);
Matrix e_coefficient(std::size_t n, long alpha, const MomentTable& t,
                     double rcond_floor = kDefaultRcondFloor);
Matrix omega_coefficient(std::size_t n, long alpha, const MomentTable& t,
                         double rcond_floor = kDefaultRcondFloor);
Matrix epsilon_coefficient(std::size_t n, long alpha, const MomentTable& t,
                           double rcond_floor = kDefaultRcondFloor);

struct LatticeCoefficients {
  Matrix q, e, omega, epsilon;
};
LatticeCoefficients lattice_coefficients(std::size_t n, long alpha,
                                         const MomentTable& t,
                                         double rcond_floor =
                                             kDefaultRcondFloor);

// Recurrence coefficients at fixed (n, alpha):
//   x^theta P_n = P_{n+theta} + sum_{j=n-1}^{n+theta-1} kappa_{n,j} P_j
//   x Q_n       = Q_{n+1}     + sum_{j=n-theta}^{n}     ell_{n,j}   Q_j
// Lists start at the clamped lower index (j >= 0).
struct RecurrenceCoefficients {
  std::size_t n = 0;
  long alpha = 0;
  long kappa_j_min = 0;
  std::vector<Matrix> kappa;
  long ell_j_min = 0;
  std::vector<Matrix> ell;
};
RecurrenceCoefficients recurrence_coefficients(std::size_t n, long alpha,
                                               const MomentTable& t,
                                               double rcond_floor =
                                                   kDefaultRcondFloor);

// Residual of the tau-function identity
//   H_{n+1}^(a) = H_n^(a+theta+1)
//               + H_n^(a+1) ((H_{n-1}^(a+theta+1))^{-1} - (H_n^(a))^{-1}) H_n^(a+theta)
// for n >= 1. `scale` (optional) receives ||LHS||_F + ||RHS||_F + 1.
double tau_identity_residual(std::size_t n, long alpha, const MomentTable& t,
                             double rcond_floor = kDefaultRcondFloor,
                             double* scale = nullptr);

}  // namespace blockqd
