#include <cstdlib>
#include <string_view>

#include "gapminer/simd.hpp"

namespace gapminer::simd {

#if defined(GAPMINER_HAVE_AVX2)
const Kernels& avx2_kernel_table();
#endif

const Kernels* avx2_kernels() {
#if defined(GAPMINER_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  if (supported) return &avx2_kernel_table();
#endif
  return nullptr;
}

const Kernels& active_kernels() {
  static const Kernels& chosen = []() -> const Kernels& {
    const char* forced = std::getenv("GAPMINER_SIMD");
    if (forced && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const Kernels* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace gapminer::simd
