#include "blockqd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blockqd/lattice.hpp"
#include "blockqd/matrix.hpp"
#include "blockqd/moments.hpp"
#include "blockqd/quasidet.hpp"

namespace blockqd {

namespace {

using Rng = std::mt19937_64;

Matrix random_block(Rng& rng, std::size_t p, double lo = -1.0,
                    double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix b(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) b(i, j) = dist(rng);
  return b;
}

Matrix random_spd_block(Rng& rng, std::size_t p) {
  const Matrix a = random_block(rng, p);
  return a * a.transposed() + 0.5 * Matrix::identity(p);
}

QuasiGrid random_boosted_grid(Rng& rng, std::size_t n, std::size_t p) {
  QuasiGrid g(n, n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix b = random_block(rng, p);
      if (i == j) b += 3.0 * Matrix::identity(p);
      g.set(i, j, b);
    }
  return g;
}

std::vector<double> random_nodes(Rng& rng, std::size_t count) {
  // distinct, positive, modest spread so the moment grids stay conditioned
  std::vector<double> nodes(count);
  std::uniform_real_distribution<double> jitter(0.0, 0.8);
  const double step = 1.8 / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i)
    nodes[i] = 0.4 + step * (static_cast<double>(i) + 0.1 + jitter(rng) * 0.9);
  return nodes;
}

MomentTable random_measure_table(Rng& rng, std::size_t p, std::size_t theta,
                                 std::size_t atoms) {
  DiscreteMeasure mu;
  mu.p = p;
  mu.nodes = random_nodes(rng, atoms);
  for (std::size_t i = 0; i < atoms; ++i)
    mu.weights.push_back(random_spd_block(rng, p));
  return MomentTable(std::move(mu), theta);
}

BlockPoly random_poly(Rng& rng, std::size_t p, std::size_t degree) {
  BlockPoly f;
  for (std::size_t k = 0; k <= degree; ++k) f.push_back(random_block(rng, p));
  return f;
}

void fold(IdentityCheck& check, double residual) {
  check.max_residual = std::max(check.max_residual, residual);
  check.trials += 1;
}

double rel(double raw, double scale) { return raw / std::max(scale, 1.0); }

double block_rel_diff(const Matrix& got, const Matrix& want) {
  return (got - want).frobenius() / std::max(1.0, want.frobenius());
}

// node-wise residual of sum(terms) over the measure's atoms, scaled by the
// largest term magnitude seen
double nodewise_residual(const std::vector<const BlockPoly*>& terms,
                         const MomentTable& t) {
  double worst = 0.0;
  for (double x : t.measure().nodes) {
    Matrix acc(t.block_order(), t.block_order());
    double scale = 1.0;
    for (const BlockPoly* f : terms) {
      const Matrix v = poly_eval(*f, x);
      scale = std::max(scale, v.frobenius());
      acc += v;
    }
    worst = std::max(worst, acc.frobenius() / scale);
  }
  return worst;
}

}  // namespace

std::vector<IdentityCheck> verify_quasidet(std::size_t trials,
                                           std::uint64_t seed) {
  IdentityCheck jacobi{"jacobi_identity", 0.0, 1e-10, 0};
  IdentityCheck hom_row{"homological_row", 0.0, 1e-10, 0};
  IdentityCheck hom_col{"homological_col", 0.0, 1e-10, 0};
  IdentityCheck solve_vs_dense{"solve_left_vs_dense", 0.0, 1e-10, 0};

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed * 1000003ULL + trial);
    const std::size_t p = 1 + trial % 3;
    const std::size_t n = 3 + trial % 2;
    const QuasiGrid g = random_boosted_grid(rng, n, p);

    double scale = 1.0;
    const double jac = jacobi_identity_residual(g, kDefaultRcondFloor, &scale);
    fold(jacobi, rel(jac, scale));

    const auto [hr, hc] =
        homological_residuals(g, kDefaultRcondFloor, &scale);
    fold(hom_row, rel(hr, scale));
    fold(hom_col, rel(hc, scale));

    std::vector<Matrix> rhs;
    for (std::size_t i = 0; i < n; ++i) rhs.push_back(random_block(rng, p));
    const std::vector<Matrix> x = solve_left(g, rhs);

    // dense oracle on the flattened system
    Matrix flat_rhs(n * p, p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c)
          flat_rhs(i * p + r, c) = rhs[i](r, c);
    const Matrix flat_x = solve(g.flatten(), flat_rhs);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) {
          const double d = x[i](r, c) - flat_x(i * p + r, c);
          diff += d * d;
          norm += flat_x(i * p + r, c) * flat_x(i * p + r, c);
        }
    fold(solve_vs_dense, std::sqrt(diff) / std::max(1.0, std::sqrt(norm)));
  }
  return {jacobi, hom_row, hom_col, solve_vs_dense};
}

std::vector<IdentityCheck> verify_moments(std::size_t trials,
                                          std::uint64_t seed) {
  IdentityCheck quasi_symmetry{"quasi_symmetry", 0.0, 1e-12, 0};
  IdentityCheck bimodule_left{"bimodule_left", 0.0, 1e-12, 0};
  IdentityCheck bimodule_right{"bimodule_right", 0.0, 1e-12, 0};
  IdentityCheck biorth{"biorthogonality", 0.0, 1e-10, 0};
  IdentityCheck christoffel_p{"christoffel_p", 0.0, 1e-10, 0};
  IdentityCheck geronimus_p{"geronimus_p", 0.0, 1e-10, 0};
  IdentityCheck christoffel_q{"christoffel_q", 0.0, 1e-10, 0};
  IdentityCheck geronimus_q{"geronimus_q", 0.0, 1e-10, 0};
  IdentityCheck recurrence_p{"recurrence_p", 0.0, 1e-10, 0};
  IdentityCheck recurrence_q{"recurrence_q", 0.0, 1e-10, 0};
  IdentityCheck tau{"tau_identity", 0.0, 1e-10, 0};
  IdentityCheck family_routes{"family_construction_routes", 0.0, 1e-10, 0};

  constexpr std::size_t kMaxDegree = 2;  // highest n the transformations use

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed * 2000003ULL + trial);
    const std::size_t p = 1 + trial % 2;
    const std::size_t theta = 1 + trial % 3;
    const std::size_t family_top = kMaxDegree + theta + 1;
    const MomentTable t =
        random_measure_table(rng, p, theta, family_top * theta + 2);

    // bilinear form structure
    for (long alpha : {0L, 1L, 2L}) {
      const BlockPoly f = random_poly(rng, p, 2);
      const BlockPoly g = random_poly(rng, p, 2);
      const Matrix lhs = bilinear(poly_shift(f, theta), g, alpha, t);
      const Matrix rhs = bilinear(f, poly_shift(g, 1), alpha, t);
      fold(quasi_symmetry,
           rel((lhs - rhs).frobenius(),
               lhs.frobenius() + rhs.frobenius() + 1.0));

      const Matrix l1 = random_block(rng, p), l2 = random_block(rng, p);
      const BlockPoly f2 = random_poly(rng, p, 2);
      const Matrix left_lhs = bilinear(
          poly_add(poly_left_mul(l1, f), poly_left_mul(l2, f2)), g, alpha, t);
      const Matrix left_rhs =
          l1 * bilinear(f, g, alpha, t) + l2 * bilinear(f2, g, alpha, t);
      fold(bimodule_left,
           rel((left_lhs - left_rhs).frobenius(),
               left_lhs.frobenius() + left_rhs.frobenius() + 1.0));

      const Matrix r1 = random_block(rng, p), r2 = random_block(rng, p);
      const BlockPoly g2 = random_poly(rng, p, 2);
      const Matrix right_lhs = bilinear(
          f, poly_add(poly_left_mul(r1, g), poly_left_mul(r2, g2)), alpha, t);
      const Matrix right_rhs = bilinear(f, g, alpha, t) * r1.transposed() +
                               bilinear(f, g2, alpha, t) * r2.transposed();
      fold(bimodule_right,
           rel((right_lhs - right_rhs).frobenius(),
               right_lhs.frobenius() + right_rhs.frobenius() + 1.0));
    }

    // families at the levels the transformations connect
    const long theta_l = static_cast<long>(theta);
    auto pfam = [&](long alpha) {
      return build_family(FamilyKind::P, family_top, alpha, t);
    };
    auto qfam = [&](long alpha) {
      return build_family(FamilyKind::Q, family_top, alpha, t);
    };
    const PolynomialFamily p0 = pfam(0), p1 = pfam(1), pth = pfam(theta_l);
    const PolynomialFamily q0 = qfam(0), q1 = qfam(1), qth = qfam(theta_l);

    double hscale = 1.0;
    for (std::size_t d = 0; d <= kMaxDegree; ++d)
      hscale = std::max(hscale, normalization_h(d, 0, t).frobenius());
    fold(biorth, biorthogonality_residual(p0, q0, t) / hscale);

    for (std::size_t n = 0; n <= kMaxDegree; ++n) {
      const long nl = static_cast<long>(n);
      // Christoffel for P: x P_n^(1) - P_{n+1}^(0) - omega_{n+1}^(0) P_n^(0)
      const LatticeCoefficients c_next = lattice_coefficients(n + 1, 0, t);
      const BlockPoly lhs_cp = poly_shift(p1[n], 1);
      const BlockPoly t2_cp = poly_left_mul(-1.0 * Matrix::identity(p),
                                            p0[n + 1]);
      const BlockPoly t3_cp =
          poly_left_mul(-1.0 * c_next.omega, p0[n]);
      fold(christoffel_p, nodewise_residual({&lhs_cp, &t2_cp, &t3_cp}, t));

      // Christoffel for Q: x Q_n^(theta) - Q_{n+1}^(0) - q_{n+1}^(0) Q_n^(0)
      const BlockPoly lhs_cq = poly_shift(qth[n], 1);
      const BlockPoly t2_cq =
          poly_left_mul(-1.0 * Matrix::identity(p), q0[n + 1]);
      const BlockPoly t3_cq = poly_left_mul(-1.0 * c_next.q, q0[n]);
      fold(christoffel_q, nodewise_residual({&lhs_cq, &t2_cq, &t3_cq}, t));

      if (n >= 1) {
        const LatticeCoefficients c_n = lattice_coefficients(n, 0, t);
        // Geronimus for P: P_n^(0) - P_n^(theta) - eps_n^(0) P_{n-1}^(theta)
        const BlockPoly lhs_gp = p0[n];
        const BlockPoly t2_gp =
            poly_left_mul(-1.0 * Matrix::identity(p), pth[n]);
        const BlockPoly t3_gp = poly_left_mul(-1.0 * c_n.epsilon, pth[n - 1]);
        fold(geronimus_p, nodewise_residual({&lhs_gp, &t2_gp, &t3_gp}, t));

        // Geronimus for Q: Q_n^(0) - Q_n^(1) - e_n^(0) Q_{n-1}^(1)
        const BlockPoly lhs_gq = q0[n];
        const BlockPoly t2_gq =
            poly_left_mul(-1.0 * Matrix::identity(p), q1[n]);
        const BlockPoly t3_gq = poly_left_mul(-1.0 * c_n.e, q1[n - 1]);
        fold(geronimus_q, nodewise_residual({&lhs_gq, &t2_gq, &t3_gq}, t));

        double tau_scale = 1.0;
        const double tau_raw = tau_identity_residual(
            n, nl - 1, t, kDefaultRcondFloor, &tau_scale);
        fold(tau, rel(tau_raw, tau_scale));
      }

      // recurrence for P: x^theta P_n = P_{n+theta} + sum kappa_{n,j} P_j
      {
        const RecurrenceCoefficients rc = recurrence_coefficients(n, 0, t);
        std::vector<BlockPoly> terms;
        terms.push_back(poly_shift(p0[n], theta));
        terms.push_back(
            poly_left_mul(-1.0 * Matrix::identity(p), p0[n + theta]));
        for (std::size_t idx = 0; idx < rc.kappa.size(); ++idx)
          terms.push_back(poly_left_mul(
              -1.0 * rc.kappa[idx],
              p0[static_cast<std::size_t>(rc.kappa_j_min) + idx]));
        std::vector<const BlockPoly*> ptrs;
        for (const BlockPoly& f : terms) ptrs.push_back(&f);
        fold(recurrence_p, nodewise_residual(ptrs, t));

        // recurrence for Q: x Q_n = Q_{n+1} + sum ell_{n,j} Q_j
        std::vector<BlockPoly> qterms;
        qterms.push_back(poly_shift(q0[n], 1));
        qterms.push_back(
            poly_left_mul(-1.0 * Matrix::identity(p), q0[n + 1]));
        for (std::size_t idx = 0; idx < rc.ell.size(); ++idx)
          qterms.push_back(poly_left_mul(
              -1.0 * rc.ell[idx],
              q0[static_cast<std::size_t>(rc.ell_j_min) + idx]));
        std::vector<const BlockPoly*> qptrs;
        for (const BlockPoly& f : qterms) qptrs.push_back(&f);
        fold(recurrence_q, nodewise_residual(qptrs, t));
      }
    }

    // the two construction routes agree coefficient-wise
    if (p <= 2) {
      for (std::size_t d = 1; d <= 3; ++d) {
        const BlockPoly via_solve = build_family(FamilyKind::P, d, 1, t)[d];
        const BlockPoly via_qd =
            family_poly_via_quasidet(FamilyKind::P, d, 1, t);
        double worst = 0.0;
        for (std::size_t k = 0; k <= d; ++k)
          worst = std::max(worst, block_rel_diff(via_solve[k], via_qd[k]));
        const BlockPoly via_solve_q = build_family(FamilyKind::Q, d, 1, t)[d];
        const BlockPoly via_qd_q =
            family_poly_via_quasidet(FamilyKind::Q, d, 1, t);
        for (std::size_t k = 0; k <= d; ++k)
          worst = std::max(worst, block_rel_diff(via_solve_q[k], via_qd_q[k]));
        fold(family_routes, worst);
      }
    }
  }

  return {quasi_symmetry, bimodule_left, bimodule_right, biorth,
          christoffel_p,  geronimus_p,   christoffel_q,  geronimus_q,
          recurrence_p,   recurrence_q,  tau,            family_routes};
}

std::vector<IdentityCheck> verify_lattice(std::size_t trials,
                                          std::uint64_t seed) {
  IdentityCheck toda2_equiv{"toda2_moment_equivalence", 0.0, 1e-10, 0};
  IdentityCheck toda1_equiv{"toda1_moment_equivalence", 0.0, 1e-10, 0};
  IdentityCheck compatibility{"factor_compatibility", 0.0, 1e-10, 0};
  IdentityCheck conjugation{"step_conjugates_j", 0.0, 1e-9, 0};

  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed * 3000003ULL + trial);
    const std::size_t p = 1 + trial % 2;
    const std::size_t theta = 1 + (trial / 2) % 3;
    const std::size_t n = 2 + trial % 3;
    // exactly n atoms: the zero boundary of the truncated lattice is exact
    const MomentTable t = random_measure_table(rng, p, theta, n);

    TodaIIState s2 = toda2_from_measure(t, n, 0);
    TodaIState s1 = toda1_from_measure(t, n, 0);

    for (long step = 1; step <= 3; ++step) {
      {
        const BlockGrid j_before = assemble(s2);
        const Matrix l_flat =
            LowerFactor(s2.n, s2.p, s2.e[0]).to_grid().flatten();
        s2 = toda2_step(s2);
        const Matrix j_after = assemble(s2).flatten();
        const Matrix conj = solve(l_flat, j_before.flatten() * l_flat);
        fold(conjugation, (j_after - conj).frobenius() /
                              std::max(1.0, j_before.flatten().frobenius()));
      }
      const TodaIIState oracle2 = toda2_from_measure(t, n, step);
      double worst = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        worst = std::max(worst, block_rel_diff(s2.q[m], oracle2.q[m]));
      for (std::size_t k = 0; k < theta; ++k)
        for (std::size_t m = 0; m + 1 < n; ++m)
          worst = std::max(worst, block_rel_diff(s2.e[k][m], oracle2.e[k][m]));
      fold(toda2_equiv, worst);

      s1 = toda1_step(s1);
      const TodaIState oracle1 = toda1_from_measure(t, n, step);
      worst = 0.0;
      for (std::size_t k = 0; k < theta; ++k)
        for (std::size_t m = 0; m < n; ++m)
          worst = std::max(worst,
                           block_rel_diff(s1.omega[k][m], oracle1.omega[k][m]));
      for (std::size_t m = 0; m + 1 < n; ++m)
        worst =
            std::max(worst, block_rel_diff(s1.epsilon[m], oracle1.epsilon[m]));
      fold(toda1_equiv, worst);
    }

    double jnorm = 1.0;
    const TodaIIState fresh = toda2_from_measure(t, n, 0);
    const double raw = compatibility_residual(fresh, kDefaultRcondFloor, &jnorm);
    fold(compatibility, rel(raw, jnorm));
  }

  return {toda2_equiv, toda1_equiv, compatibility, conjugation};
}

}  // namespace blockqd
