//
// Copyright 2026 The dpmul Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <cstdlib>
#include <cstring>

#include "dpmul/kernels/kernels.hpp"

namespace dpmul::kernels {

#if defined(DPMUL_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

const KernelTable* Avx2Kernels() {
#if defined(DPMUL_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& ActiveKernels() {
  static const KernelTable* table = [] {
    const char* forced = std::getenv("DPMUL_ISA");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) {
      return &ScalarKernels();
    }
    const KernelTable* avx2 = Avx2Kernels();
    return avx2 != nullptr ? avx2 : &ScalarKernels();
  }();
  return *table;
}

std::string ActiveIsaName() { return ActiveKernels().name; }

}  // namespace dpmul::kernels
