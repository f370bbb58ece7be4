#include <immintrin.h>

#include <cmath>

#include "toral/kernels.hpp"

namespace toral::kernels {

namespace {

// (l0 + l2) + (l1 + l3), matching the scalar reference.
inline double fold(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

std::size_t count_le_avx2(const double* x, std::size_t n, double s) {
  const __m256d sv = _mm256_set1_pd(s);
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t count = 0;
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), sv, _CMP_LE_OQ);
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(mask))));
  }
  for (std::size_t i = n4; i < n; ++i) count += x[i] <= s ? 1U : 0U;
  return count;
}

void indicator_le_avx2(const double* x, std::size_t n, double s, double* out) {
  const __m256d sv = _mm256_set1_pd(s);
  const __m256d one = _mm256_set1_pd(1.0);
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), sv, _CMP_LE_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(mask, one));
  }
  for (std::size_t i = n4; i < n; ++i) out[i] = x[i] <= s ? 1.0 : 0.0;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double r = fold(acc);
  for (std::size_t i = n4; i < n; ++i) r += a[i] * b[i];
  return r;
}

double weighted_abs_sum_avx2(const double* v, const double* w, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d mag = _mm256_andnot_pd(sign, _mm256_loadu_pd(v + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(mag, _mm256_loadu_pd(w + i)));
  }
  double r = fold(acc);
  for (std::size_t i = n4; i < n; ++i) r += std::fabs(v[i]) * w[i];
  return r;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = fold(acc);
  for (std::size_t i = n4; i < n; ++i) r += x[i];
  return r;
}

constexpr KernelTable kAvx2{"avx2", count_le_avx2, indicator_le_avx2, dot_avx2, weighted_abs_sum_avx2, sum_avx2};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace toral::kernels
