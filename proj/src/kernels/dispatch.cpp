#include <cstdlib>
#include <string_view>

#include "toral/kernels.hpp"

namespace toral::kernels {

namespace detail {
#ifndef TORAL_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#ifndef TORAL_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(TORAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select() {
  const auto variants = available();
  if (const char* forced = std::getenv("TORAL_KERNELS")) {
    for (const KernelTable* t : variants)
      if (t->name == std::string_view(forced)) return *t;
  }
  return *variants.back();
}

}  // namespace

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* t = detail::avx2_table(); t != nullptr && cpu_has_avx2()) out.push_back(t);
  if (const KernelTable* t = detail::neon_table(); t != nullptr) out.push_back(t);
  return out;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace toral::kernels
