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

#ifndef DPMUL_RNG_HPP_
#define DPMUL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace dpmul {

// splitmix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for stream `index` under `base`. Depends only on the pair, so chunked
// work produces the same draws regardless of how chunks map to threads.
constexpr std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index) {
  return SplitMix64(SplitMix64(base) ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

// Seeded random source. Owned by exactly one worker.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns 0 or 1.
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform() < p; }

  double Sign() { return (engine_() >> 63) ? -1.0 : 1.0; }

  // Standard normal via Box-Muller (no cached second value, keeps the
  // stream position a pure function of the call count).
  double StandardNormal() {
    const double u1 = UniformOpen();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dpmul

#endif  // DPMUL_RNG_HPP_
