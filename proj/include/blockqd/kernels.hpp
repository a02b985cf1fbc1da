#pragma once

#include <cstddef>
#include <string_view>

// Low-level array kernels behind the dense matrix type. Each operation has
// a scalar reference implementation and, where the host CPU supports it, a
// SIMD variant (AVX2+FMA on x86-64, NEON on aarch64). The active backend is
// resolved once at startup from a CPU probe and can be forced through
// set_backend() or the BLOCKQD_KERNELS environment variable
// (scalar|avx2|neon|auto). SIMD and scalar variants are equivalence-tested
// against each other.

namespace blockqd::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

struct Table {
  // y[i] += a * x[i]
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
  double (*sum_squares)(std::size_t n, const double* x);
  // out[i] = x[i] + y[i] / x[i] - y[i]
  void (*add)(std::size_t n, const double* x, const double* y, double* out);
  void (*sub)(std::size_t n, const double* x, const double* y, double* out);
  // x[i] *= a
  void (*scale)(std::size_t n, double a, double* x);
  // C (m x n) += A (m x k) * B (k x n), all row-major, no aliasing
  void (*matmul_accum)(std::size_t m, std::size_t k, std::size_t n,
                       const double* a, const double* b, double* c);
  Backend backend;
};

// Backend available on this CPU?
bool backend_supported(Backend b);

// Table for a specific backend; valid only if backend_supported(b).
const Table& table_for(Backend b);

// Currently active table (CPU probe or override).
const Table& active();
Backend active_backend();

// Force a backend at runtime. Returns false (and leaves the active backend
// unchanged) if the CPU does not support it.
bool set_backend(Backend b);

inline void axpy(std::size_t n, double a, const double* x, double* y) {
  active().axpy(n, a, x, y);
}
inline double dot(std::size_t n, const double* x, const double* y) {
  return active().dot(n, x, y);
}
inline double sum_squares(std::size_t n, const double* x) {
  return active().sum_squares(n, x);
}
inline void add(std::size_t n, const double* x, const double* y, double* out) {
  active().add(n, x, y, out);
}
inline void sub(std::size_t n, const double* x, const double* y, double* out) {
  active().sub(n, x, y, out);
}
inline void scale(std::size_t n, double a, double* x) {
  active().scale(n, a, x);
}
inline void matmul_accum(std::size_t m, std::size_t k, std::size_t n,
                         const double* a, const double* b, double* c) {
  active().matmul_accum(m, k, n, a, b, c);
}

}  // namespace blockqd::kernels
