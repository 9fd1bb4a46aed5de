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

// Hand-rolled generators shared by the property tests.

#ifndef HLLC_TESTS_TEST_SUPPORT_H_
#define HLLC_TESTS_TEST_SUPPORT_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "hllc/ans.h"
#include "hllc/model.h"
#include "hllc/random.h"
#include "hllc/vector_ans.h"

namespace hllc::testing {

// Mixture of flat, geometric, spiky and sparse shapes; at least one entry is
// positive.
inline std::vector<double> RandomPmf(Rng& rng, size_t n) {
  std::vector<double> pmf(n);
  switch (rng.Below(4)) {
    case 0:
      for (double& p : pmf) p = 1.0;
      break;
    case 1: {
      const double decay = 0.01 + rng.Uniform();
      for (size_t s = 0; s < n; ++s) pmf[s] = std::exp(-decay * s);
      break;
    }
    case 2:
      for (double& p : pmf) p = std::pow(rng.Uniform(), 6.0);
      break;
    default:
      for (double& p : pmf) p = rng.Below(3) == 0 ? rng.Uniform() : 0.0;
      break;
  }
  pmf[rng.Below(n)] += 0.5;
  return pmf;
}

inline QuantizedDistribution RandomDistribution(Rng& rng, size_t n,
                                                unsigned precision) {
  return Quantize(RandomPmf(rng, n), precision);
}

// A distribution with a random alphabet size that fits the precision.
inline QuantizedDistribution RandomDistribution(Rng& rng) {
  const unsigned precision = 1 + static_cast<unsigned>(rng.Below(kMaxPrecision));
  const size_t max_n = std::min<size_t>(size_t{1} << precision, 300);
  return RandomDistribution(rng, 1 + rng.Below(max_n), precision);
}

inline uint32_t DrawSymbol(const QuantizedDistribution& d, Rng& rng) {
  return d.SymbolForSlot(
      static_cast<uint32_t>(rng.Below(uint64_t{1} << d.precision())));
}

inline std::vector<uint32_t> RandomWords(Rng& rng, size_t n) {
  std::vector<uint32_t> words(n);
  for (uint32_t& w : words) w = rng.NextU32();
  return words;
}

inline uint64_t RandomHeadValue(Rng& rng) {
  return kHeadLowerBound + rng.Below(UINT64_MAX - kHeadLowerBound);
}

// A scalar state with a random head and `words` random stream words.
inline ScalarAnsState RandomScalarState(Rng& rng, size_t words) {
  ScalarAnsState s;
  s.head = RandomHeadValue(rng);
  s.stream = RandomWords(rng, words);
  return s;
}

inline ShapedMessage RandomMessage(Rng& rng, const HeadShape& shape,
                                   size_t words) {
  std::vector<uint64_t> head(shape.lane_count());
  for (uint64_t& h : head) h = RandomHeadValue(rng);
  return ShapedMessage(shape, std::move(head), RandomWords(rng, words));
}

inline Image RandomNoiseImage(Rng& rng, Shape3 shape) {
  Image x(shape);
  for (uint8_t& v : x.data) v = static_cast<uint8_t>(rng.Below(256));
  return x;
}

inline size_t CeilLog2(size_t n) {
  size_t k = 0;
  while ((size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace hllc::testing

#endif  // HLLC_TESTS_TEST_SUPPORT_H_
