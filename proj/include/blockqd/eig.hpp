#pragma once

#include <complex>
#include <vector>

#include "blockqd/matrix.hpp"

namespace blockqd {

// Eigenvalues of a small dense real matrix: balancing, Householder
// reduction to upper Hessenberg, then shifted double-step QR iteration.
// Complex values appear in conjugate pairs. Throws EigenvalueError if the
// iteration stalls.
std::vector<std::complex<double>> dense_eigenvalues(Matrix a);

// Upper bound on sigma_min(a - lambda I) from one inverse-iteration pass
// against a pivoted complex LU; small values certify rank deficiency.
double rank_deficiency_proxy(const Matrix& a, std::complex<double> lambda);

}  // namespace blockqd
