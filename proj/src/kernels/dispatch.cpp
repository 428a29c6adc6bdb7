#include <cstdlib>
#include <string_view>

#include "mussels/simd.hpp"

namespace mussels::simd {

#if defined(MUSSELS_HAVE_AVX2)
KernelTable const& avx2_table();
#endif

KernelTable const* avx2_kernels()
{
#if defined(MUSSELS_HAVE_AVX2)
  static bool const supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

KernelTable const& kernels()
{
  static KernelTable const& selected = [] () -> KernelTable const& {
    char const* forced = std::getenv("MUSSELS_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return scalar_kernels();
    }
    if (auto const* t = avx2_kernels()) {
      return *t;
    }
    return scalar_kernels();
  }();
  return selected;
}

}  // namespace mussels::simd
