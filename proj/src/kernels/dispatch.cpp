#include <cstdlib>
#include <stdexcept>

#include "dirac_green/kernels.hpp"

namespace dg::kernels {

std::vector<std::string> available_kernels() {
  std::vector<std::string> out{"scalar"};
#if defined(__x86_64__) || defined(__i386__)
  if (avx2_available()) out.push_back("avx2");
#endif
#if defined(__aarch64__)
  out.push_back("neon");
#endif
  return out;
}

const FoldKernel& select_kernel(std::string_view override_name) {
  std::string name(override_name);
  if (name.empty()) {
    if (const char* env = std::getenv("DIRAC_GREEN_KERNEL")) name = env;
  }
  if (!name.empty() && name != "auto") {
    if (name == "scalar") return scalar_kernel();
#if defined(__x86_64__) || defined(__i386__)
    if (name == "avx2") {
      if (!avx2_available()) {
        throw std::invalid_argument("fold kernel 'avx2' not supported here");
      }
      return avx2_kernel();
    }
#endif
#if defined(__aarch64__)
    if (name == "neon") return neon_kernel();
#endif
    throw std::invalid_argument("unknown fold kernel '" + name + "'");
  }
#if defined(__x86_64__) || defined(__i386__)
  if (avx2_available()) return avx2_kernel();
#endif
#if defined(__aarch64__)
  return neon_kernel();
#endif
  return scalar_kernel();
}

}  // namespace dg::kernels
