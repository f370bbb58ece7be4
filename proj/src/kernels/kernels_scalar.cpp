#include <cmath>

#include "toral/kernels.hpp"

namespace toral::kernels {

namespace {

std::size_t count_le_scalar(const double* x, std::size_t n, double s) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += x[i] <= s ? 1U : 0U;
  return count;
}

void indicator_le_scalar(const double* x, std::size_t n, double s, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] <= s ? 1.0 : 0.0;
}

template <typename Term>
double lane_reduce(std::size_t n, Term term) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4)
    for (std::size_t j = 0; j < 4; ++j) lane[j] += term(i + j);
  double acc = (lane[0] + lane[2]) + (lane[1] + lane[3]);
  for (std::size_t i = n4; i < n; ++i) acc += term(i);
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return a[i] * b[i]; });
}

double weighted_abs_sum_scalar(const double* v, const double* w, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return std::fabs(v[i]) * w[i]; });
}

double sum_scalar(const double* x, std::size_t n) {
  return lane_reduce(n, [&](std::size_t i) { return x[i]; });
}

constexpr KernelTable kScalar{"scalar", count_le_scalar, indicator_le_scalar, dot_scalar, weighted_abs_sum_scalar, sum_scalar};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace toral::kernels
