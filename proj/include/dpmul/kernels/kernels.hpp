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

#ifndef DPMUL_KERNELS_KERNELS_HPP_
#define DPMUL_KERNELS_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

namespace dpmul::kernels {

struct Moments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations

  void Merge(const Moments& other);
};

// Batch kernels over len independent samples. Elementwise kernels must
// produce bitwise-identical output across ISAs; Moments may differ in
// the last bits because lanes are merged at the end.
struct KernelTable {
  const char* name;

  // out = ((a + r) + sum_t s_coef[t] * s[t]) + r_coef * r
  void (*layered_share)(const double* a, const double* r,
                        const double* const* s, const double* s_coef, int ns,
                        double r_coef, double* out, std::size_t len);
  // acc *= x
  void (*multiply_inplace)(double* acc, const double* x, std::size_t len);
  // acc += w * x
  void (*axpy)(double w, const double* x, double* acc, std::size_t len);
  // out = (est - target)^2
  void (*squared_error)(const double* est, const double* target, double* out,
                        std::size_t len);
  Moments (*moments)(const double* x, std::size_t len);
};

const KernelTable& ScalarKernels();

// nullptr when the build or the CPU lacks AVX2.
const KernelTable* Avx2Kernels();

// Best table for this CPU; DPMUL_ISA=scalar|avx2 overrides.
const KernelTable& ActiveKernels();

std::string ActiveIsaName();

}  // namespace dpmul::kernels

#endif  // DPMUL_KERNELS_KERNELS_HPP_
