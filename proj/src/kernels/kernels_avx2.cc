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

// Compiled with -mavx2 only; no FMA so rounding matches the scalar path.

#include <immintrin.h>

#include "dpmul/kernels/kernels.hpp"

namespace dpmul::kernels {
namespace {

void LayeredShare(const double* a, const double* r, const double* const* s,
                  const double* s_coef, int ns, double r_coef, double* out,
                  std::size_t len) {
  const __m256d rc = _mm256_set1_pd(r_coef);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d rv = _mm256_loadu_pd(r + i);
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(a + i), rv);
    for (int t = 0; t < ns; ++t) {
      const __m256d c = _mm256_set1_pd(s_coef[t]);
      v = _mm256_add_pd(v, _mm256_mul_pd(c, _mm256_loadu_pd(s[t] + i)));
    }
    v = _mm256_add_pd(v, _mm256_mul_pd(rc, rv));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < len; ++i) {
    double v = a[i] + r[i];
    for (int t = 0; t < ns; ++t) v = v + s_coef[t] * s[t][i];
    out[i] = v + r_coef * r[i];
  }
}

void MultiplyInplace(double* acc, const double* x, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(x + i)));
  }
  for (; i < len; ++i) acc[i] *= x[i];
}

void Axpy(double w, const double* x, double* acc, std::size_t len) {
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d p = _mm256_mul_pd(wv, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < len; ++i) acc[i] = acc[i] + w * x[i];
}

void SquaredError(const double* est, const double* target, double* out,
                  std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d e =
        _mm256_sub_pd(_mm256_loadu_pd(est + i), _mm256_loadu_pd(target + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(e, e));
  }
  for (; i < len; ++i) {
    const double e = est[i] - target[i];
    out[i] = e * e;
  }
}

// Four interleaved Welford streams, merged with Chan's formula.
Moments Welford(const double* x, std::size_t len) {
  __m256d mean = _mm256_setzero_pd();
  __m256d m2 = _mm256_setzero_pd();
  std::size_t i = 0;
  std::int64_t k = 0;
  for (; i + 4 <= len; i += 4) {
    ++k;
    const __m256d inv = _mm256_set1_pd(1.0 / static_cast<double>(k));
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d d = _mm256_sub_pd(v, mean);
    mean = _mm256_add_pd(mean, _mm256_mul_pd(d, inv));
    m2 = _mm256_add_pd(m2, _mm256_mul_pd(d, _mm256_sub_pd(v, mean)));
  }
  alignas(32) double mean_l[4];
  alignas(32) double m2_l[4];
  _mm256_store_pd(mean_l, mean);
  _mm256_store_pd(m2_l, m2);
  Moments out;
  for (int l = 0; l < 4; ++l) {
    out.Merge(Moments{k, mean_l[l], m2_l[l]});
  }
  Moments tail;
  for (; i < len; ++i) {
    ++tail.count;
    const double d = x[i] - tail.mean;
    tail.mean += d / static_cast<double>(tail.count);
    tail.m2 += d * (x[i] - tail.mean);
  }
  out.Merge(tail);
  return out;
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table = {"avx2",       LayeredShare, MultiplyInplace,
                                Axpy,         SquaredError, Welford};

}  // namespace dpmul::kernels
