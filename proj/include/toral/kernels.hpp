#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every variant accumulates in four interleaved lanes (element i goes to lane
// i mod 4), folds the lanes as (l0 + l2) + (l1 + l3) and then adds the tail
// sequentially. The scalar reference follows the same order, so all variants
// return identical bits and results never depend on the host CPU.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace toral::kernels {

struct KernelTable {
  std::string_view name;
  /// #{i : x[i] <= s}.
  std::size_t (*count_le)(const double* x, std::size_t n, double s);
  /// out[i] = x[i] <= s ? 1.0 : 0.0.
  void (*indicator_le)(const double* x, std::size_t n, double s, double* out);
  /// sum_i a[i] * b[i].
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i |v[i]| * w[i].
  double (*weighted_abs_sum)(const double* v, const double* w, std::size_t n);
  /// sum_i x[i].
  double (*sum)(const double* x, std::size_t n);
};

const KernelTable& scalar();

/// Variants compiled into this binary and supported by the running CPU,
/// scalar first.
std::vector<const KernelTable*> available();

/// The table used by the library: the widest supported variant, unless the
/// environment variable TORAL_KERNELS names another ("scalar", "avx2", "neon").
const KernelTable& active();

// Convenience wrappers over active().
inline std::size_t count_le(std::span<const double> x, double s) { return active().count_le(x.data(), x.size(), s); }
inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a.data(), b.data(), a.size()); }
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

namespace detail {
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace toral::kernels
