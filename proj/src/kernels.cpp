#include "rfc/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__)
#include <immintrin.h>
#define RFC_X86 1
#else
#define RFC_X86 0
#endif

namespace rfc::kernels {

namespace scalar {

double sum(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

double sum_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void scale(std::span<double> x, double a) {
  for (double& v : x) v *= a;
}

}  // namespace scalar

#if RFC_X86

namespace avx2 {

__attribute__((target("avx2,fma"))) static double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

__attribute__((target("avx2,fma"))) double sum(std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

__attribute__((target("avx2,fma"))) double sum_abs(std::span<const double> x) {
  const __m256d mask = _mm256_set1_pd(-0.0);
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(
        acc, _mm256_andnot_pd(mask, _mm256_loadu_pd(x.data() + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::abs(x[i]);
  return s;
}

__attribute__((target("avx2,fma"))) double max_abs(std::span<const double> x) {
  const __m256d mask = _mm256_set1_pd(-0.0);
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_max_pd(
        acc, _mm256_andnot_pd(mask, _mm256_loadu_pd(x.data() + i)));
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  lo = _mm_max_pd(lo, hi);
  double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

__attribute__((target("avx2,fma"))) double dot(std::span<const double> a,
                                           std::span<const double> b) {
  const std::size_t n = a.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i),
                          _mm256_loadu_pd(b.data() + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

__attribute__((target("avx2,fma"))) double sum_sq(std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x.data() + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

__attribute__((target("avx2,fma"))) void scale(std::span<double> x, double a) {
  const __m256d av = _mm256_set1_pd(a);
  const std::size_t n = x.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x.data() + i,
                     _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), av));
  for (; i < n; ++i) x[i] *= a;
}

}  // namespace avx2

static bool have_avx2() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

#else

static bool have_avx2() { return false; }

#endif

double sum(std::span<const double> x) {
#if RFC_X86
  if (have_avx2()) return avx2::sum(x);
#endif
  return scalar::sum(x);
}

double sum_abs(std::span<const double> x) {
#if RFC_X86
  if (have_avx2()) return avx2::sum_abs(x);
#endif
  return scalar::sum_abs(x);
}

double max_abs(std::span<const double> x) {
#if RFC_X86
  if (have_avx2()) return avx2::max_abs(x);
#endif
  return scalar::max_abs(x);
}

double dot(std::span<const double> a, std::span<const double> b) {
#if RFC_X86
  if (have_avx2()) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

double sum_sq(std::span<const double> x) {
#if RFC_X86
  if (have_avx2()) return avx2::sum_sq(x);
#endif
  return scalar::sum_sq(x);
}

void scale(std::span<double> x, double a) {
#if RFC_X86
  if (have_avx2()) return avx2::scale(x, a);
#endif
  scalar::scale(x, a);
}

std::string_view active_backend() { return have_avx2() ? "avx2" : "scalar"; }

}  // namespace rfc::kernels
