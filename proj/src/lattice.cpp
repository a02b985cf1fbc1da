#include "blockqd/lattice.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace blockqd {

namespace {

void check_layered(std::size_t theta, std::size_t n, std::size_t p,
                   const std::vector<Matrix>& diag,
                   const std::vector<std::vector<Matrix>>& layers,
                   const char* who) {
  if (theta == 0 || n == 0 || p == 0)
    throw std::invalid_argument(std::string(who) +
                                ": theta, n, p must be positive");
  if (diag.size() != n)
    throw std::invalid_argument(std::string(who) + ": expected n diagonal blocks");
  if (layers.size() != theta)
    throw std::invalid_argument(std::string(who) + ": expected theta layers");
  for (const Matrix& b : diag)
    if (b.rows() != p || b.cols() != p || !b.all_finite())
      throw std::invalid_argument(std::string(who) + ": bad diagonal block");
  for (const auto& layer : layers) {
    if (layer.size() + 1 != n)
      throw std::invalid_argument(std::string(who) +
                                  ": expected n-1 blocks per layer");
    for (const Matrix& b : layer)
      if (b.rows() != p || b.cols() != p || !b.all_finite())
        throw std::invalid_argument(std::string(who) + ": bad layer block");
  }
}

Matrix pivot_inverse(const Matrix& pivot, std::size_t index,
                     double rcond_floor) {
  const LuFactorization f = lu_factor(pivot);
  if (f.singular || f.rcond_estimate < rcond_floor)
    throw BreakdownError("lattice step: pivot q_" + std::to_string(index) +
                             " numerically singular (rcond " +
                             std::to_string(f.rcond_estimate) + ")",
                         0, index, f.rcond_estimate);
  return lu_solve(f, Matrix::identity(pivot.order()));
}

}  // namespace

void TodaIIState::validate() const { check_layered(theta, n, p, q, e, "TodaIIState"); }

void TodaIState::validate() const {
  if (theta == 0 || n == 0 || p == 0)
    throw std::invalid_argument("TodaIState: theta, n, p must be positive");
  if (omega.size() != theta)
    throw std::invalid_argument("TodaIState: expected theta omega layers");
  for (const auto& layer : omega)
    if (layer.size() != n)
      throw std::invalid_argument("TodaIState: expected n blocks per omega layer");
  if (epsilon.size() + 1 != n)
    throw std::invalid_argument("TodaIState: expected n-1 epsilon blocks");
}

TodaIIState toda2_step(const TodaIIState& s, double rcond_floor) {
  s.validate();
  const std::vector<Matrix>& qa = s.q;
  const std::vector<Matrix>& ea = s.e[0];

  std::vector<Matrix> qn(s.n, Matrix(s.p, s.p));
  std::vector<Matrix> en(s.n > 0 ? s.n - 1 : 0, Matrix(s.p, s.p));
  qn[0] = qa[0];
  if (s.n > 1) qn[0] += ea[0];
  for (std::size_t m = 1; m < s.n; ++m) {
    en[m - 1] = qa[m] * ea[m - 1] * pivot_inverse(qn[m - 1], m, rcond_floor);
    qn[m] = qa[m] - en[m - 1];
    if (m + 1 < s.n) qn[m] += ea[m];
  }

  TodaIIState out;
  out.theta = s.theta;
  out.n = s.n;
  out.p = s.p;
  out.alpha = s.alpha + 1;
  out.q = std::move(qn);
  out.e.assign(s.e.begin() + 1, s.e.end());
  out.e.push_back(std::move(en));
  return out;
}

TodaIState toda1_step(const TodaIState& s, double rcond_floor) {
  s.validate();
  const std::vector<Matrix>& wa = s.omega[0];
  const std::vector<Matrix>& ea = s.epsilon;

  std::vector<Matrix> wn(s.n, Matrix(s.p, s.p));
  std::vector<Matrix> en(s.n > 0 ? s.n - 1 : 0, Matrix(s.p, s.p));
  wn[0] = wa[0];
  if (s.n > 1) wn[0] += ea[0];
  for (std::size_t m = 1; m < s.n; ++m) {
    en[m - 1] = wa[m] * ea[m - 1] * pivot_inverse(wn[m - 1], m, rcond_floor);
    wn[m] = wa[m] - en[m - 1];
    if (m + 1 < s.n) wn[m] += ea[m];
  }

  TodaIState out;
  out.theta = s.theta;
  out.n = s.n;
  out.p = s.p;
  out.alpha = s.alpha + 1;
  out.omega.assign(s.omega.begin() + 1, s.omega.end());
  out.omega.push_back(std::move(wn));
  out.epsilon = std::move(en);
  return out;
}

double compatibility_residual(const TodaIIState& s, double rcond_floor,
                              double* scale) {
  const TodaIIState next = toda2_step(s, rcond_floor);
  const BlockGrid r_a = UpperFactor(s.n, s.p, s.q).to_grid();
  const BlockGrid l_a = LowerFactor(s.n, s.p, s.e[0]).to_grid();
  const BlockGrid l_ath =
      LowerFactor(s.n, s.p, next.e[s.theta - 1]).to_grid();
  const BlockGrid r_a1 = UpperFactor(s.n, s.p, next.q).to_grid();

  const Matrix lhs = multiply(r_a, l_a).flatten();
  const Matrix rhs = multiply(l_ath, r_a1).flatten();
  if (scale != nullptr) *scale = assemble(s).flatten().frobenius();
  return (lhs - rhs).frobenius();
}

BlockGrid assemble(const TodaIIState& s) {
  s.validate();
  std::vector<LowerFactor> lowers;
  lowers.reserve(s.theta);
  for (const auto& layer : s.e) lowers.emplace_back(s.n, s.p, layer);
  return assemble_j(lowers, UpperFactor(s.n, s.p, s.q));
}

TodaIIState toda2_from_measure(const MomentTable& t, std::size_t n,
                               long alpha, double rcond_floor) {
  TodaIIState s;
  s.theta = t.theta();
  s.n = n;
  s.p = t.block_order();
  s.alpha = alpha;
  for (std::size_t m = 1; m <= n; ++m)
    s.q.push_back(q_coefficient(m, alpha, t, rcond_floor));
  for (std::size_t k = 0; k < s.theta; ++k) {
    std::vector<Matrix> layer;
    for (std::size_t m = 1; m < n; ++m)
      layer.push_back(
          e_coefficient(m, alpha + static_cast<long>(k), t, rcond_floor));
    s.e.push_back(std::move(layer));
  }
  return s;
}

TodaIState toda1_from_measure(const MomentTable& t, std::size_t n, long alpha,
                              double rcond_floor) {
  TodaIState s;
  s.theta = t.theta();
  s.n = n;
  s.p = t.block_order();
  s.alpha = alpha;
  for (std::size_t k = 0; k < s.theta; ++k) {
    std::vector<Matrix> layer;
    for (std::size_t m = 1; m <= n; ++m)
      layer.push_back(
          omega_coefficient(m, alpha + static_cast<long>(k), t, rcond_floor));
    s.omega.push_back(std::move(layer));
  }
  for (std::size_t m = 1; m < n; ++m)
    s.epsilon.push_back(epsilon_coefficient(m, alpha, t, rcond_floor));
  return s;
}

}  // namespace blockqd
