#include "epf/kernels.hpp"

#include <atomic>
#include <cmath>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define EPF_HAVE_AVX2_BUILD 1
#include <immintrin.h>
#endif

namespace epf::kernels {

namespace {
std::atomic<bool> g_force_scalar{false};

bool detect_avx2() {
#ifdef EPF_HAVE_AVX2_BUILD
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const bool g_avx2 = detect_avx2();
}  // namespace

void set_force_scalar(bool v) { g_force_scalar.store(v, std::memory_order_relaxed); }
bool force_scalar() { return g_force_scalar.load(std::memory_order_relaxed); }
bool avx2_available() { return g_avx2; }
const char* active_backend() { return (g_avx2 && !force_scalar()) ? "avx2" : "scalar"; }

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

double sum_abs_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i]);
  return s;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace detail

#ifdef EPF_HAVE_AVX2_BUILD

namespace {

// Horizontal sum of a 4-lane accumulator. Fixed lane order keeps results
// identical run to run.
__attribute__((target("avx2,fma")))
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  const __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2));
  return _mm_cvtsd_f64(s1);
}

__attribute__((target("avx2,fma")))
double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2,fma")))
double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

__attribute__((target("avx2,fma")))
double sum_sq_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * a[i];
  return s;
}

__attribute__((target("avx2,fma")))
double sum_abs_avx2(const double* a, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(a + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::abs(a[i]);
  return s;
}

__attribute__((target("avx2,fma")))
double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Plain mul+add, not FMA: per-element results stay bit-identical with the
// scalar path, which keeps sequential solvers (coordinate descent, SMO) on
// the same trajectory under either backend.
__attribute__((target("avx2")))
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

#endif  // EPF_HAVE_AVX2_BUILD

#ifdef EPF_HAVE_AVX2_BUILD
#define EPF_DISPATCH(fn, ...)                                        \
  do {                                                               \
    if (g_avx2 && !g_force_scalar.load(std::memory_order_relaxed)) { \
      return fn##_avx2(__VA_ARGS__);                                 \
    }                                                                \
    return detail::fn##_scalar(__VA_ARGS__);                         \
  } while (0)
#else
#define EPF_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { EPF_DISPATCH(dot, a, b, n); }
double sum(const double* a, std::size_t n) { EPF_DISPATCH(sum, a, n); }
double sum_sq(const double* a, std::size_t n) { EPF_DISPATCH(sum_sq, a, n); }
double sum_abs(const double* a, std::size_t n) { EPF_DISPATCH(sum_abs, a, n); }
double sq_dist(const double* a, const double* b, std::size_t n) { EPF_DISPATCH(sq_dist, a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { EPF_DISPATCH(axpy, alpha, x, y, n); }

#undef EPF_DISPATCH

}  // namespace epf::kernels
