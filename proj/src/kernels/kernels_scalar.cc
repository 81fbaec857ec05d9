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

#include "dpmul/kernels/kernels.hpp"

namespace dpmul::kernels {
namespace {

void LayeredShare(const double* a, const double* r, const double* const* s,
                  const double* s_coef, int ns, double r_coef, double* out,
                  std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) out[i] = a[i] + r[i];
  for (int t = 0; t < ns; ++t) {
    const double c = s_coef[t];
    const double* st = s[t];
    for (std::size_t i = 0; i < len; ++i) out[i] = out[i] + c * st[i];
  }
  for (std::size_t i = 0; i < len; ++i) out[i] = out[i] + r_coef * r[i];
}

void MultiplyInplace(double* acc, const double* x, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) acc[i] *= x[i];
}

void Axpy(double w, const double* x, double* acc, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) acc[i] = acc[i] + w * x[i];
}

void SquaredError(const double* est, const double* target, double* out,
                  std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    const double e = est[i] - target[i];
    out[i] = e * e;
  }
}

Moments Welford(const double* x, std::size_t len) {
  Moments m;
  for (std::size_t i = 0; i < len; ++i) {
    ++m.count;
    const double d = x[i] - m.mean;
    m.mean += d / static_cast<double>(m.count);
    m.m2 += d * (x[i] - m.mean);
  }
  return m;
}

constexpr KernelTable kScalar = {"scalar",     LayeredShare, MultiplyInplace,
                                 Axpy,         SquaredError, Welford};

}  // namespace

void Moments::Merge(const Moments& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count);
  const double n2 = static_cast<double>(other.count);
  const double n = n1 + n2;
  const double d = other.mean - mean;
  mean += d * (n2 / n);
  m2 += other.m2 + d * d * (n1 * n2 / n);
  count += other.count;
}

const KernelTable& ScalarKernels() { return kScalar; }

}  // namespace dpmul::kernels
