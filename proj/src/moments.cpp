#include "blockqd/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace blockqd {

namespace {

// b * a^{-1}
Matrix right_divide(const Matrix& b, const Matrix& a, double rcond_floor) {
  return solve(a.transposed(), b.transposed(), rcond_floor).transposed();
}

bool spd_check(const Matrix& w) {
  const std::size_t p = w.order();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (std::abs(w(i, j) - w(j, i)) >
          1e-12 * std::max(1.0, w.max_abs()))
        return false;
  // Cholesky; fails iff not numerically positive definite
  Matrix l(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = w(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (p == 0) throw std::invalid_argument("DiscreteMeasure: p must be >= 1");
  if (nodes.empty())
    throw std::invalid_argument("DiscreteMeasure: need at least one node");
  if (weights.size() != nodes.size())
    throw std::invalid_argument(
        "DiscreteMeasure: one weight per node required");
  for (double x : nodes)
    if (!std::isfinite(x))
      throw std::invalid_argument("DiscreteMeasure: non-finite node");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j])
        throw std::invalid_argument("DiscreteMeasure: repeated node " +
                                    std::to_string(nodes[i]));
  for (const Matrix& w : weights) {
    if (w.rows() != p || w.cols() != p)
      throw std::invalid_argument("DiscreteMeasure: weight order mismatch");
    if (!w.all_finite())
      throw std::invalid_argument("DiscreteMeasure: non-finite weight");
    if (!spd_check(w))
      throw std::invalid_argument(
          "DiscreteMeasure: weight not symmetric positive definite");
  }
}

MomentTable::MomentTable(DiscreteMeasure measure, std::size_t theta)
    : measure_(std::move(measure)), theta_(theta) {
  if (theta_ == 0)
    throw std::invalid_argument("MomentTable: theta must be >= 1");
  measure_.validate();
}

Matrix MomentTable::moment(long gamma) const {
  if (gamma < 0)
    throw std::invalid_argument("MomentTable: moment index must be >= 0");
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(gamma);
  if (it != cache_.end()) return it->second;
  Matrix m(measure_.p, measure_.p);
  for (std::size_t i = 0; i < measure_.nodes.size(); ++i)
    m += std::pow(measure_.nodes[i], static_cast<double>(gamma)) *
         measure_.weights[i];
  cache_.emplace(gamma, m);
  return m;
}

Matrix poly_eval(const BlockPoly& f, double x) {
  if (f.empty()) throw std::invalid_argument("poly_eval: empty polynomial");
  Matrix acc = f.back();
  for (std::size_t k = f.size() - 1; k-- > 0;) {
    acc *= x;
    acc += f[k];
  }
  return acc;
}

BlockPoly poly_shift(const BlockPoly& f, std::size_t k) {
  if (f.empty()) return f;
  BlockPoly out(k, Matrix(f[0].rows(), f[0].cols()));
  out.insert(out.end(), f.begin(), f.end());
  return out;
}

BlockPoly poly_left_mul(const Matrix& l, const BlockPoly& f) {
  BlockPoly out;
  out.reserve(f.size());
  for (const Matrix& c : f) out.push_back(l * c);
  return out;
}

BlockPoly poly_add(const BlockPoly& f, const BlockPoly& g) {
  BlockPoly out = f.size() >= g.size() ? f : g;
  const BlockPoly& small = f.size() >= g.size() ? g : f;
  for (std::size_t k = 0; k < small.size(); ++k) out[k] += small[k];
  return out;
}

BlockPoly poly_sub(const BlockPoly& f, const BlockPoly& g) {
  BlockPoly neg;
  neg.reserve(g.size());
  for (const Matrix& c : g) neg.push_back(-Matrix(c));
  return poly_add(f, neg);
}

Matrix bilinear(const BlockPoly& f, const BlockPoly& g, long alpha,
                const MomentTable& t) {
  if (alpha < 0)
    throw std::invalid_argument("bilinear: alpha must be >= 0");
  const DiscreteMeasure& mu = t.measure();
  Matrix acc(mu.p, mu.p);
  const double theta = static_cast<double>(t.theta());
  for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
    const double x = mu.nodes[i];
    const Matrix fx = poly_eval(f, x);
    const Matrix gx = poly_eval(g, std::pow(x, theta));
    acc += fx * (std::pow(x, static_cast<double>(alpha)) * mu.weights[i]) *
           gx.transposed();
  }
  return acc;
}

QuasiGrid moment_grid(std::size_t n, long alpha, const MomentTable& t) {
  QuasiGrid g(n + 1, n + 1, t.block_order());
  const long theta = static_cast<long>(t.theta());
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      g.set(i, j,
            t.moment(alpha + static_cast<long>(i) +
                     static_cast<long>(j) * theta));
  return g;
}

Matrix normalization_h(std::size_t n, long alpha, const MomentTable& t,
                       double rcond_floor) {
  return quasidet(moment_grid(n, alpha, t), n, n, rcond_floor);
}

PolynomialFamily build_family(FamilyKind kind, std::size_t n, long alpha,
                              const MomentTable& t, double rcond_floor) {
  const std::size_t p = t.block_order();
  const long theta = static_cast<long>(t.theta());
  PolynomialFamily fam{kind, alpha, {}};
  fam.polys.reserve(n + 1);
  fam.polys.push_back({Matrix::identity(p)});

  for (std::size_t d = 1; d <= n; ++d) {
    QuasiGrid sys(d, d, p);
    std::vector<Matrix> rhs;
    rhs.reserve(d);
    const long dl = static_cast<long>(d);
    for (std::size_t i = 0; i < d; ++i) {
      const long il = static_cast<long>(i);
      for (std::size_t k = 0; k < d; ++k) {
        const long kl = static_cast<long>(k);
        // P: sum_k c_k m_{a+k+i*theta} = -m_{a+d+i*theta}, transposed so the
        // unknown c_k^T sits on the right. Q: coefficients already right-side.
        sys.set(i, k,
                kind == FamilyKind::P
                    ? t.moment(alpha + kl + il * theta).transposed()
                    : t.moment(alpha + il + kl * theta));
      }
      rhs.push_back(kind == FamilyKind::P
                        ? -t.moment(alpha + dl + il * theta).transposed()
                        : -t.moment(alpha + il + dl * theta));
    }
    const std::vector<Matrix> x = solve_left(sys, rhs, rcond_floor);
    BlockPoly poly;
    poly.reserve(d + 1);
    for (const Matrix& xk : x) poly.push_back(xk.transposed());
    poly.push_back(Matrix::identity(p));
    fam.polys.push_back(std::move(poly));
  }
  return fam;
}

BlockPoly family_poly_via_quasidet(FamilyKind kind, std::size_t n, long alpha,
                                   const MomentTable& t, double rcond_floor) {
  const std::size_t p = t.block_order();
  const long theta = static_cast<long>(t.theta());
  if (n == 0) return {Matrix::identity(p)};

  // flattened leading n x n moment minor, shared by both expressions
  QuasiGrid minor(n, n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      minor.set(i, j,
                t.moment(alpha + static_cast<long>(i) +
                         static_cast<long>(j) * theta));
  const Matrix m = minor.flatten();

  auto gated_factor = [&](Matrix mat) {
    LuFactorization f = lu_factor(std::move(mat));
    if (f.singular || f.rcond_estimate < rcond_floor)
      throw SingularMinorError(
          "family_poly_via_quasidet: moment minor singular (rcond " +
              std::to_string(f.rcond_estimate) + ")",
          f.rcond_estimate);
    return f;
  };

  BlockPoly poly;
  poly.reserve(n + 1);
  if (kind == FamilyKind::P) {
    // P_n = x^n I - r M^{-1} (I, xI, ..., x^{n-1} I)^T with r the bottom
    // moment row; coefficient of x^k is -(r M^{-1})_k
    Matrix r(p, n * p);
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix b = t.moment(alpha + static_cast<long>(n) +
                                static_cast<long>(j) * theta);
      for (std::size_t rr = 0; rr < p; ++rr)
        for (std::size_t cc = 0; cc < p; ++cc) r(rr, j * p + cc) = b(rr, cc);
    }
    const Matrix y =
        lu_solve(gated_factor(m.transposed()), r.transposed()).transposed();
    for (std::size_t k = 0; k < n; ++k) {
      Matrix c(p, p);
      for (std::size_t rr = 0; rr < p; ++rr)
        for (std::size_t cc = 0; cc < p; ++cc) c(rr, cc) = -y(rr, k * p + cc);
      poly.push_back(std::move(c));
    }
  } else {
    // Q_n^T = x^n I - (I, ..., x^{n-1} I) M^{-1} c with c the right moment
    // column; coefficient of x^j in Q_n^T is -(M^{-1} c)_j
    Matrix c(n * p, p);
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix b = t.moment(alpha + static_cast<long>(i) +
                                static_cast<long>(n) * theta);
      for (std::size_t rr = 0; rr < p; ++rr)
        for (std::size_t cc = 0; cc < p; ++cc) c(i * p + rr, cc) = b(rr, cc);
    }
    const Matrix x = lu_solve(gated_factor(m), c);
    for (std::size_t j = 0; j < n; ++j) {
      Matrix cj(p, p);
      for (std::size_t rr = 0; rr < p; ++rr)
        for (std::size_t cc = 0; cc < p; ++cc)
          cj(rr, cc) = -x(j * p + rr, cc);
      poly.push_back(cj.transposed());
    }
  }
  poly.push_back(Matrix::identity(p));
  return poly;
}

double biorthogonality_residual(const PolynomialFamily& pfam,
                                const PolynomialFamily& qfam,
                                const MomentTable& t, double rcond_floor) {
  if (pfam.alpha != qfam.alpha)
    throw std::invalid_argument(
        "biorthogonality_residual: families at different levels");
  const std::size_t n = std::min(pfam.max_degree(), qfam.max_degree());
  double off = 0.0, diag = 0.0;
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= n; ++b) {
      const Matrix g = bilinear(pfam[a], qfam[b], pfam.alpha, t);
      if (a == b)
        diag = std::max(
            diag,
            (g - normalization_h(a, pfam.alpha, t, rcond_floor)).frobenius());
      else
        off = std::max(off, g.frobenius());
    }
  }
  return off + diag;
}

namespace {

void require_index(std::size_t n, const char* who) {
  if (n == 0)
    throw std::invalid_argument(std::string(who) + ": index n must be >= 1");
}

}  // namespace

Matrix q_coefficient(std::size_t n, long alpha, const MomentTable& t,
                     double rcond_floor) {
  require_index(n, "q_coefficient");
  const long theta = static_cast<long>(t.theta());
  return solve(normalization_h(n - 1, alpha, t, rcond_floor),
               normalization_h(n - 1, alpha + theta, t, rcond_floor),
               rcond_floor)
      .transposed();
}

Matrix e_coefficient(std::size_t n, long alpha, const MomentTable& t,
                     double rcond_floor) {
  require_index(n, "e_coefficient");
  return solve(normalization_h(n - 1, alpha + 1, t, rcond_floor),
               normalization_h(n, alpha, t, rcond_floor), rcond_floor)
      .transposed();
}

Matrix omega_coefficient(std::size_t n, long alpha, const MomentTable& t,
                         double rcond_floor) {
  require_index(n, "omega_coefficient");
  return right_divide(normalization_h(n - 1, alpha + 1, t, rcond_floor),
                      normalization_h(n - 1, alpha, t, rcond_floor),
                      rcond_floor);
}

Matrix epsilon_coefficient(std::size_t n, long alpha, const MomentTable& t,
                           double rcond_floor) {
  require_index(n, "epsilon_coefficient");
  const long theta = static_cast<long>(t.theta());
  return right_divide(
      normalization_h(n, alpha, t, rcond_floor),
      normalization_h(n - 1, alpha + theta, t, rcond_floor), rcond_floor);
}

LatticeCoefficients lattice_coefficients(std::size_t n, long alpha,
                                         const MomentTable& t,
                                         double rcond_floor) {
  LatticeCoefficients out;
  out.q = q_coefficient(n, alpha, t, rcond_floor);
  out.e = e_coefficient(n, alpha, t, rcond_floor);
  out.omega = omega_coefficient(n, alpha, t, rcond_floor);
  out.epsilon = epsilon_coefficient(n, alpha, t, rcond_floor);
  return out;
}

RecurrenceCoefficients recurrence_coefficients(std::size_t n, long alpha,
                                               const MomentTable& t,
                                               double rcond_floor) {
  const std::size_t theta = t.theta();
  const std::size_t qmax = n + theta - 1;
  const PolynomialFamily pfam =
      build_family(FamilyKind::P, n, alpha, t, rcond_floor);
  const PolynomialFamily qfam =
      build_family(FamilyKind::Q, std::max(qmax, n), alpha, t, rcond_floor);

  RecurrenceCoefficients out;
  out.n = n;
  out.alpha = alpha;

  out.kappa_j_min = std::max<long>(0, static_cast<long>(n) - 1);
  for (long j = out.kappa_j_min; j <= static_cast<long>(qmax); ++j) {
    const Matrix num = bilinear(pfam[n], poly_shift(qfam[j], 1), alpha, t);
    out.kappa.push_back(right_divide(
        num, normalization_h(j, alpha, t, rcond_floor), rcond_floor));
  }

  out.ell_j_min =
      std::max<long>(0, static_cast<long>(n) - static_cast<long>(theta));
  for (long j = out.ell_j_min; j <= static_cast<long>(n); ++j) {
    const Matrix num = bilinear(pfam[j], poly_shift(qfam[n], 1), alpha, t);
    out.ell.push_back(
        right_divide(num, normalization_h(j, alpha, t, rcond_floor),
                     rcond_floor)
            .transposed());
  }
  return out;
}

double tau_identity_residual(std::size_t n, long alpha, const MomentTable& t,
                             double rcond_floor, double* scale) {
  if (n == 0)
    throw std::invalid_argument("tau_identity_residual: n must be >= 1");
  const long theta = static_cast<long>(t.theta());
  const Matrix lhs = normalization_h(n + 1, alpha, t, rcond_floor);
  const Matrix h_th1 = normalization_h(n, alpha + theta + 1, t, rcond_floor);
  const Matrix h_1 = normalization_h(n, alpha + 1, t, rcond_floor);
  const Matrix h_th = normalization_h(n, alpha + theta, t, rcond_floor);
  const Matrix mid =
      inverse(normalization_h(n - 1, alpha + theta + 1, t, rcond_floor),
              rcond_floor) -
      inverse(normalization_h(n, alpha, t, rcond_floor), rcond_floor);
  const Matrix rhs = h_th1 + h_1 * mid * h_th;
  if (scale != nullptr) *scale = lhs.frobenius() + rhs.frobenius() + 1.0;
  return (lhs - rhs).frobenius();
}

}  // namespace blockqd
