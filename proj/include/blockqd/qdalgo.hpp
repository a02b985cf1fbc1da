#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "blockqd/lattice.hpp"
#include "blockqd/matrix.hpp"

namespace blockqd {

// Algorithm state: the Toda-II variables plus the count of completed outer
// sweeps. After k sweeps the q-level is theta * k.
struct HungryState {
  TodaIIState toda;
  std::size_t sweeps = 0;
};

// One outer sweep: the theta inner layer iterations applied in place, in
// the exact update order of the recurrence (the q used in each e-update is
// the already-advanced value). Equivalent to theta applications of
// toda2_step; the equivalence is pinned by tests. Throws BreakdownError.
void sweep(HungryState& s, double rcond_floor = kDefaultRcondFloor);

// Per-sweep diagnostics: ||q_m||_F for m = 1..n, then ||e_m||_F per layer.
struct SweepRecord {
  std::vector<double> q_norms;
  std::vector<std::vector<double>> e_norms;
};

struct SweepTrace {
  std::vector<SweepRecord> rows;
  bool breakdown = false;
};

enum class ConvergenceStatus { Converged, NotConverged, Breakdown };

struct BreakdownInfo {
  std::size_t layer = 0;
  std::size_t pivot_index = 0;
  double rcond = 0.0;
};

struct RunResult {
  HungryState state;
  SweepTrace trace;
  ConvergenceStatus status = ConvergenceStatus::NotConverged;
  std::optional<BreakdownInfo> breakdown;
  double final_max_e = 0.0;
};

// Largest ||e_m||_F over all layers; below tol certifies the assembled J is
// block upper triangular to tol.
double max_subdiagonal_norm(const HungryState& s);

// Sweep until max ||e||_F < tol, max_sweeps is exhausted, or a pivot breaks
// down. The trace carries one row per completed sweep.
RunResult run(HungryState s, double tol, std::size_t max_sweeps,
              double rcond_floor = kDefaultRcondFloor);

// Eigenvalues of one p x p block: closed forms for p <= 2, the QR kernel
// above that. Every value is certified against the block
// (rank_deficiency_proxy <= tol * ||b||_F, with an epsilon clamp);
// certificate failure or QR stall raises EigenvalueError.
std::vector<std::complex<double>> small_eigenvalues(
    const Matrix& b, double tol = kDefaultRcondFloor);

struct SpectrumValue {
  std::complex<double> lambda;
  double residual = 0.0;  // certificate against the owning q block
};

struct Spectrum {
  std::vector<SpectrumValue> values;
};

// Union of small_eigenvalues over q_1..q_n, sorted ascending by modulus,
// ties broken by imaginary part ascending.
Spectrum extract_spectrum(const HungryState& s,
                          double tol = kDefaultRcondFloor);

}  // namespace blockqd
