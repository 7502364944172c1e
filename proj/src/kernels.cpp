#include "vfp/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace vfp::kernels {

#ifdef VFP_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

const KernelTable* avx2_table() {
#ifdef VFP_HAVE_AVX2
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("VFP_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_table();
    if (const KernelTable* t = avx2_table()) return t;
    return &scalar_table();
  }();
  return *chosen;
}

}  // namespace vfp::kernels
