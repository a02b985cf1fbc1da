#include "blockqd/qdalgo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "blockqd/eig.hpp"

namespace blockqd {

void sweep(HungryState& s, double rcond_floor) {
  TodaIIState& toda = s.toda;
  toda.validate();
  const std::size_t n = toda.n;

  for (std::size_t layer = 0; layer < toda.theta; ++layer) {
    std::vector<Matrix>& e = toda.e[layer];
    std::vector<Matrix>& q = toda.q;
    if (n > 1) q[0] += e[0];
    for (std::size_t m = 2; m <= n; ++m) {
      const LuFactorization f = lu_factor(q[m - 2]);
      if (f.singular || f.rcond_estimate < rcond_floor)
        throw BreakdownError(
            "sweep: pivot q_" + std::to_string(m - 1) + " in layer " +
                std::to_string(layer) + " numerically singular (rcond " +
                std::to_string(f.rcond_estimate) + ")",
            layer, m - 1, f.rcond_estimate);
      e[m - 2] =
          q[m - 1] * e[m - 2] * lu_solve(f, Matrix::identity(toda.p));
      q[m - 1] -= e[m - 2];
      if (m <= n - 1) q[m - 1] += e[m - 1];
    }
  }
  toda.alpha += static_cast<long>(toda.theta);
  s.sweeps += 1;
}

double max_subdiagonal_norm(const HungryState& s) {
  double m = 0.0;
  for (const auto& layer : s.toda.e)
    for (const Matrix& b : layer) m = std::max(m, b.frobenius());
  return m;
}

namespace {

SweepRecord record_of(const HungryState& s) {
  SweepRecord rec;
  rec.q_norms.reserve(s.toda.n);
  for (const Matrix& b : s.toda.q) rec.q_norms.push_back(b.frobenius());
  for (const auto& layer : s.toda.e) {
    std::vector<double> norms;
    norms.reserve(layer.size());
    for (const Matrix& b : layer) norms.push_back(b.frobenius());
    rec.e_norms.push_back(std::move(norms));
  }
  return rec;
}

}  // namespace

RunResult run(HungryState s, double tol, std::size_t max_sweeps,
              double rcond_floor) {
  if (!(tol > 0.0)) throw std::invalid_argument("run: tol must be positive");
  RunResult result;
  for (std::size_t k = 0; k < max_sweeps; ++k) {
    try {
      sweep(s, rcond_floor);
    } catch (const BreakdownError& err) {
      result.trace.breakdown = true;
      result.status = ConvergenceStatus::Breakdown;
      result.breakdown =
          BreakdownInfo{err.layer(), err.pivot_index(), err.rcond()};
      break;
    }
    result.trace.rows.push_back(record_of(s));
    if (max_subdiagonal_norm(s) < tol) {
      result.status = ConvergenceStatus::Converged;
      break;
    }
  }
  result.final_max_e = max_subdiagonal_norm(s);
  result.state = std::move(s);
  return result;
}

std::vector<std::complex<double>> small_eigenvalues(const Matrix& b,
                                                    double tol) {
  if (!b.all_finite())
    throw std::invalid_argument("small_eigenvalues: non-finite block");
  const std::vector<std::complex<double>> eigs = dense_eigenvalues(b);

  const double certificate_tol =
      std::max(tol, 256.0 * std::numeric_limits<double>::epsilon());
  const double threshold =
      certificate_tol *
      std::max(b.frobenius(), std::numeric_limits<double>::min());
  for (const auto& lambda : eigs) {
    const double residual = rank_deficiency_proxy(b, lambda);
    if (residual > threshold)
      throw EigenvalueError(
          "small_eigenvalues: residual certificate failed (residual " +
          std::to_string(residual) + " > " + std::to_string(threshold) + ")");
  }
  return eigs;
}

Spectrum extract_spectrum(const HungryState& s, double tol) {
  Spectrum spectrum;
  for (const Matrix& q : s.toda.q) {
    for (const auto& lambda : small_eigenvalues(q, tol))
      spectrum.values.push_back(
          SpectrumValue{lambda, rank_deficiency_proxy(q, lambda)});
  }
  std::sort(spectrum.values.begin(), spectrum.values.end(),
            [](const SpectrumValue& a, const SpectrumValue& b) {
              const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
              if (ma != mb) return ma < mb;
              return a.lambda.imag() < b.lambda.imag();
            });
  return spectrum;
}

}  // namespace blockqd
