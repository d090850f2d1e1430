#include <cstdlib>
#include <string_view>

#include "zkb/kernels.hpp"

namespace zkb::kernels {

#if defined(ZKB_HAVE_AVX2)
const KernelSet& avx2_set();
#endif

const KernelSet* avx2() {
#if defined(ZKB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active() {
  static const KernelSet& chosen = [] () -> const KernelSet& {
    const char* env = std::getenv("ZKB_KERNELS");
    if (env && std::string_view(env) == "scalar") return scalar();
    if (const KernelSet* k = avx2()) return *k;
    return scalar();
  }();
  return chosen;
}

}  // namespace zkb::kernels
