// Copyright 2026 The hllc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The one seeded generator behind seed words, synthetic data and Monte-Carlo
// estimates. Integer outputs are the raw mt19937_64 stream, which the C++
// standard pins down exactly; real-valued draws are built from those bits.

#ifndef HLLC_RANDOM_H_
#define HLLC_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace hllc {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  uint32_t NextU32() { return static_cast<uint32_t>(engine_() >> 32); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  // Uniform on (0, 1).
  double OpenUniform() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Box-Muller; one draw per call, no cached second value.
  double Normal() {
    const double u = OpenUniform();
    const double v = Uniform();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
  }

  double Logistic() {
    const double u = OpenUniform();
    return std::log(u) - std::log1p(-u);
  }

  // Uniform integer in [0, n) by rejection.
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hllc

#endif  // HLLC_RANDOM_H_
