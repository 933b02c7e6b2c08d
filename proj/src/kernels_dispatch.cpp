#include "semfuse/kernels.hpp"

#include <cstdlib>

namespace semfuse::kernels {

const Dispatch& active() {
  static const Dispatch* selected = [] {
    if (const char* env = std::getenv("SEMFUSE_NO_SIMD");
        env != nullptr && env[0] == '1')
      return &scalar();
    if (const Dispatch* v = avx2()) return v;
    return &scalar();
  }();
  return *selected;
}

}  // namespace semfuse::kernels
