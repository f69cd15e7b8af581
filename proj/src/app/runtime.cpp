// SPDX-License-Identifier: Apache-2.0
#include "acmv/app.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace acmv::app {

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
}

}  // namespace acmv::app
