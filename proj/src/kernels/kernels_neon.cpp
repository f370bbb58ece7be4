#include <arm_neon.h>

#include <cmath>

#include "toral/kernels.hpp"

// Two float64x2 registers hold lanes {0,1} and {2,3}, so the fold
// (l0 + l2) + (l1 + l3) is one vector add followed by a pairwise add.

namespace toral::kernels {

namespace {

inline double fold(float64x2_t lo, float64x2_t hi) {
  const float64x2_t pair = vaddq_f64(lo, hi);
  return vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
}

std::size_t count_le_neon(const double* x, std::size_t n, double s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += x[i] <= s ? 1U : 0U;
  return count;
}

void indicator_le_neon(const double* x, std::size_t n, double s, double* out) {
  const float64x2_t sv = vdupq_n_f64(s);
  const float64x2_t one = vdupq_n_f64(1.0);
  const std::size_t n2 = n & ~std::size_t{1};
  for (std::size_t i = 0; i < n2; i += 2) {
    const uint64x2_t mask = vcleq_f64(vld1q_f64(x + i), sv);
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(mask, vreinterpretq_u64_f64(one))));
  }
  for (std::size_t i = n2; i < n; ++i) out[i] = x[i] <= s ? 1.0 : 0.0;
}

template <typename Load>
double reduce4(std::size_t n, Load load) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) {
    lo = vaddq_f64(lo, load(i));
    hi = vaddq_f64(hi, load(i + 2));
  }
  return fold(lo, hi);
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  double r = reduce4(n, [&](std::size_t i) { return vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)); });
  for (std::size_t i = n & ~std::size_t{3}; i < n; ++i) r += a[i] * b[i];
  return r;
}

double weighted_abs_sum_neon(const double* v, const double* w, std::size_t n) {
  double r = reduce4(n, [&](std::size_t i) { return vmulq_f64(vabsq_f64(vld1q_f64(v + i)), vld1q_f64(w + i)); });
  for (std::size_t i = n & ~std::size_t{3}; i < n; ++i) r += std::fabs(v[i]) * w[i];
  return r;
}

double sum_neon(const double* x, std::size_t n) {
  double r = reduce4(n, [&](std::size_t i) { return vld1q_f64(x + i); });
  for (std::size_t i = n & ~std::size_t{3}; i < n; ++i) r += x[i];
  return r;
}

constexpr KernelTable kNeon{"neon", count_le_neon, indicator_le_neon, dot_neon, weighted_abs_sum_neon, sum_neon};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace toral::kernels
