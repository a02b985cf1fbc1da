#include "blockqd/eig.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>

namespace blockqd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_like(double magnitude, double carrier) {
  return carrier >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Parlett-Reinsch balancing with radix-2 scaling; similarity transform, so
// the spectrum is untouched.
void balance(Matrix& a) {
  const std::size_t n = a.order();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      double g = r / 2.0;
      while (c < g) {
        f *= 2.0;
        c *= 4.0;
      }
      g = r * 2.0;
      while (c > g) {
        f /= 2.0;
        c /= 4.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double inv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form.
void to_hessenberg(Matrix& a) {
  const std::size_t n = a.order();
  if (n < 3) return;
  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double norm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i)
      norm_sq += a(i, k) * a(i, k);
    const double norm = std::sqrt(norm_sq);
    if (norm <= kEps * std::max(1.0, a.max_abs())) continue;

    const double alpha = a(k + 1, k) >= 0.0 ? -norm : norm;
    double vnorm_sq = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k);
      if (i == k + 1) v[i] -= alpha;
      vnorm_sq += v[i] * v[i];
    }
    if (vnorm_sq == 0.0) continue;
    const double scale = 2.0 / vnorm_sq;

    // left: A -= scale * v (v^T A) on rows k+1..n-1
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i] * a(i, j);
      dot *= scale;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
    }
    // right: A -= scale * (A v) v^T on cols k+1..n-1
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      dot *= scale;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * v[j];
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Shifted double-step QR on an upper Hessenberg matrix, eigenvalues only.
std::vector<std::complex<double>> hessenberg_qr(Matrix& a) {
  const std::size_t n = a.order();
  std::vector<std::complex<double>> eigs(n);

  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i >= 1 ? i - 1 : 0); j < n; ++j)
      anorm += std::abs(a(i, j));
  if (anorm == 0.0) return eigs;

  long nn = static_cast<long>(n) - 1;
  double t = 0.0;
  int its = 0;
  double p = 0, q = 0, r = 0, x = 0, y = 0, w = 0, z = 0, s = 0;

  while (nn >= 0) {
    // smallest l with a negligible subdiagonal entry a(l, l-1)
    long l = nn;
    for (; l >= 1; --l) {
      s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
      if (s == 0.0) s = anorm;
      if (std::abs(a(l, l - 1)) <= kEps * s) {
        a(l, l - 1) = 0.0;
        break;
      }
    }
    if (l < 0) l = 0;  // whole active block is irreducible

    x = a(nn, nn);
    if (l == nn) {
      eigs[nn--] = x + t;
      its = 0;
      continue;
    }
    y = a(nn - 1, nn - 1);
    w = a(nn, nn - 1) * a(nn - 1, nn);
    if (l == nn - 1) {
      p = 0.5 * (y - x);
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      x += t;
      if (q >= 0.0) {
        z = p + sign_like(z, p);
        eigs[nn - 1] = eigs[nn] = x + z;
        if (z != 0.0) eigs[nn] = x - w / z;
      } else {
        eigs[nn - 1] = {x + p, z};
        eigs[nn] = {x + p, -z};
      }
      nn -= 2;
      its = 0;
      continue;
    }

    if (its == 60)
      throw EigenvalueError(
          "dense_eigenvalues: QR iteration failed to converge");
    if (its > 0 && its % 10 == 0) {
      // exceptional shift
      t += x;
      for (long i = 0; i <= nn; ++i) a(i, i) -= x;
      s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
      y = x = 0.75 * s;
      w = -0.4375 * s * s;
    }
    ++its;

    long m = nn - 2;
    for (; m >= l; --m) {
      z = a(m, m);
      r = x - z;
      s = y - z;
      p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
      q = a(m + 1, m + 1) - z - r - s;
      r = a(m + 2, m + 1);
      s = std::abs(p) + std::abs(q) + std::abs(r);
      p /= s;
      q /= s;
      r /= s;
      if (m == l) break;
      const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
      const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) +
                                      std::abs(z) + std::abs(a(m + 1, m + 1)));
      if (u <= kEps * v) break;
    }
    if (m < l) m = l;

    for (long i = m + 2; i <= nn; ++i) {
      a(i, i - 2) = 0.0;
      if (i != m + 2) a(i, i - 3) = 0.0;
    }

    for (long k = m; k <= nn - 1; ++k) {
      if (k != m) {
        p = a(k, k - 1);
        q = a(k + 1, k - 1);
        r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
        x = std::abs(p) + std::abs(q) + std::abs(r);
        if (x != 0.0) {
          p /= x;
          q /= x;
          r /= x;
        }
      }
      s = sign_like(std::sqrt(p * p + q * q + r * r), p);
      if (s == 0.0) continue;
      if (k == m) {
        if (l != m) a(k, k - 1) = -a(k, k - 1);
      } else {
        a(k, k - 1) = -s * x;
      }
      p += s;
      x = p / s;
      y = q / s;
      z = r / s;
      q /= p;
      r /= p;
      for (long j = k; j <= nn; ++j) {
        p = a(k, j) + q * a(k + 1, j);
        if (k != nn - 1) {
          p += r * a(k + 2, j);
          a(k + 2, j) -= p * z;
        }
        a(k + 1, j) -= p * y;
        a(k, j) -= p * x;
      }
      const long mmin = std::min(nn, k + 3);
      for (long i = l; i <= mmin; ++i) {
        p = x * a(i, k) + y * a(i, k + 1);
        if (k != nn - 1) {
          p += z * a(i, k + 2);
          a(i, k + 2) -= p * r;
        }
        a(i, k + 1) -= p * q;
        a(i, k) -= p;
      }
    }
  }
  return eigs;
}

}  // namespace

std::vector<std::complex<double>> dense_eigenvalues(Matrix a) {
  const std::size_t n = a.order();
  if (!a.all_finite())
    throw std::invalid_argument("dense_eigenvalues: non-finite entries");
  if (n == 0) return {};
  if (n == 1) return {a(0, 0)};
  if (n == 2) {
    const double mean = 0.5 * (a(0, 0) + a(1, 1));
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = mean * mean - det;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double big = mean >= 0.0 ? mean + root : mean - root;
      if (big == 0.0) return {0.0, 0.0};
      return {big, det / big};
    }
    const double im = std::sqrt(-disc);
    return {{mean, im}, {mean, -im}};
  }
  balance(a);
  to_hessenberg(a);
  return hessenberg_qr(a);
}

double rank_deficiency_proxy(const Matrix& a, std::complex<double> lambda) {
  using cd = std::complex<double>;
  const std::size_t n = a.order();
  const double scale = std::max(a.frobenius(), 1.0);

  std::vector<cd> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i * n + j] = cd(a(i, j)) - (i == j ? lambda : cd(0.0));
  const std::vector<cd> m0 = m;

  // pivoted complex LU; exact zero pivots get a tiny regularization so the
  // inverse-iteration solve stays defined
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(m[col * n + col]);
    for (std::size_t rr = col + 1; rr < n; ++rr)
      if (std::abs(m[rr * n + col]) > best) {
        best = std::abs(m[rr * n + col]);
        piv = rr;
      }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(m[col * n + j], m[piv * n + j]);
      std::swap(perm[col], perm[piv]);
    }
    if (std::abs(m[col * n + col]) < kEps * kEps * scale)
      m[col * n + col] = cd(kEps * kEps * scale);
    const cd pivot = m[col * n + col];
    for (std::size_t rr = col + 1; rr < n; ++rr) {
      const cd f = m[rr * n + col] / pivot;
      m[rr * n + col] = f;
      if (f != cd(0.0))
        for (std::size_t j = col + 1; j < n; ++j)
          m[rr * n + j] -= f * m[col * n + j];
    }
  }

  // one inverse-iteration pass from a fixed dense start vector
  std::vector<cd> b(n);
  for (std::size_t i = 0; i < n; ++i)
    b[i] = cd(1.0 + 0.25 * std::sin(1.7 * static_cast<double>(i) + 0.3),
              0.25 * std::cos(2.3 * static_cast<double>(i)));

  std::vector<cd> yv(n);
  for (std::size_t i = 0; i < n; ++i) yv[i] = b[perm[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) yv[i] -= m[i * n + k] * yv[k];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k)
      yv[ii] -= m[ii * n + k] * yv[k];
    yv[ii] /= m[ii * n + ii];
  }

  double ynorm_sq = 0.0;
  for (const cd& v : yv) ynorm_sq += std::norm(v);
  const double ynorm = std::sqrt(ynorm_sq);
  if (!(ynorm > 0.0) || !std::isfinite(ynorm)) return 0.0;

  double rnorm_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cd acc(0.0);
    for (std::size_t j = 0; j < n; ++j) acc += m0[i * n + j] * yv[j];
    rnorm_sq += std::norm(acc);
  }
  return std::sqrt(rnorm_sq) / ynorm;
}

}  // namespace blockqd
