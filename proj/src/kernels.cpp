#include "blockqd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#define BLOCKQD_X86 1
#include <immintrin.h>
#else
#define BLOCKQD_X86 0
#endif

#if defined(__aarch64__)
#define BLOCKQD_AARCH64 1
#include <arm_neon.h>
#else
#define BLOCKQD_AARCH64 0
#endif

namespace blockqd::kernels {

namespace scalar {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares(std::size_t n, const double* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(std::size_t n, const double* x, const double* y, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void scale(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void matmul_accum(std::size_t m, std::size_t k, std::size_t n,
                  const double* a, const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double ail = a[i * k + l];
      const double* brow = b + l * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

}  // namespace scalar

#if BLOCKQD_X86
namespace avx2 {

__attribute__((target("avx2,fma"))) void axpy(std::size_t n, double a,
                                              const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) double dot(std::size_t n, const double* x,
                                               const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  double lanes[4];
  _mm256_storeu_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

__attribute__((target("avx2,fma"))) double sum_squares(std::size_t n,
                                                       const double* x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double lanes[4];
  _mm256_storeu_pd(lanes, acc);
  double s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

__attribute__((target("avx2"))) void add(std::size_t n, const double* x,
                                         const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

__attribute__((target("avx2"))) void sub(std::size_t n, const double* x,
                                         const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

__attribute__((target("avx2"))) void scale(std::size_t n, double a, double* x) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

__attribute__((target("avx2,fma"))) void matmul_accum(std::size_t m,
                                                      std::size_t k,
                                                      std::size_t n,
                                                      const double* a,
                                                      const double* b,
                                                      double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const __m256d va = _mm256_set1_pd(a[i * k + l]);
      const double* brow = b + l * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d vc = _mm256_loadu_pd(crow + j);
        vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
        _mm256_storeu_pd(crow + j, vc);
      }
      const double ail = a[i * k + l];
      for (; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

}  // namespace avx2
#endif  // BLOCKQD_X86

#if BLOCKQD_AARCH64
namespace neon {

void axpy(std::size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares(std::size_t n, const double* x) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void add(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] + y[i];
}

void sub(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] - y[i];
}

void scale(std::size_t n, double a, double* x) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void matmul_accum(std::size_t m, std::size_t k, std::size_t n, const double* a,
                  const double* b, double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const float64x2_t va = vdupq_n_f64(a[i * k + l]);
      const double* brow = b + l * n;
      std::size_t j = 0;
      for (; j + 2 <= n; j += 2) {
        float64x2_t vc = vld1q_f64(crow + j);
        vc = vfmaq_f64(vc, va, vld1q_f64(brow + j));
        vst1q_f64(crow + j, vc);
      }
      const double ail = a[i * k + l];
      for (; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
}

}  // namespace neon
#endif  // BLOCKQD_AARCH64

namespace {

constexpr Table kScalarTable = {
    scalar::axpy, scalar::dot,   scalar::sum_squares,  scalar::add,
    scalar::sub,  scalar::scale, scalar::matmul_accum, Backend::Scalar,
};

#if BLOCKQD_X86
constexpr Table kAvx2Table = {
    avx2::axpy, avx2::dot,   avx2::sum_squares,  avx2::add,
    avx2::sub,  avx2::scale, avx2::matmul_accum, Backend::Avx2,
};
#endif

#if BLOCKQD_AARCH64
constexpr Table kNeonTable = {
    neon::axpy, neon::dot,   neon::sum_squares,  neon::add,
    neon::sub,  neon::scale, neon::matmul_accum, Backend::Neon,
};
#endif

Backend probe_backend() {
  if (const char* env = std::getenv("BLOCKQD_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::Avx2))
      return Backend::Avx2;
    if (std::strcmp(env, "neon") == 0 && backend_supported(Backend::Neon))
      return Backend::Neon;
    // "auto" or unrecognized falls through to the probe
  }
#if BLOCKQD_X86
  if (backend_supported(Backend::Avx2)) return Backend::Avx2;
#endif
#if BLOCKQD_AARCH64
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

std::atomic<const Table*> g_active{nullptr};

const Table* resolve() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = &table_for(probe_backend());
    const Table* expected = nullptr;
    g_active.compare_exchange_strong(expected, t, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return t;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if BLOCKQD_X86
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if BLOCKQD_AARCH64
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table& table_for(Backend b) {
  switch (b) {
#if BLOCKQD_X86
    case Backend::Avx2: return kAvx2Table;
#endif
#if BLOCKQD_AARCH64
    case Backend::Neon: return kNeonTable;
#endif
    default: break;
  }
  return kScalarTable;
}

const Table& active() { return *resolve(); }

Backend active_backend() { return active().backend; }

bool set_backend(Backend b) {
  if (!backend_supported(b)) return false;
  g_active.store(&table_for(b), std::memory_order_release);
  return true;
}

}  // namespace blockqd::kernels
