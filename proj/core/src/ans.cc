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

#include "hllc/ans.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hllc {
namespace detail {

void CheckPrecision(unsigned precision) {
  if (precision < 1 || precision > kMaxPrecision) {
    throw AnsError("precision must be in [1, 24], got " +
                   std::to_string(precision));
  }
}

}  // namespace detail

QuantizedDistribution::QuantizedDistribution(std::vector<uint32_t> frequencies,
                                             unsigned precision)
    : freq_(std::move(frequencies)), precision_(precision) {
  detail::CheckPrecision(precision);
  if (freq_.empty()) throw AnsError("distribution has no symbols");
  cum_.resize(freq_.size() + 1);
  uint64_t total = 0;
  for (size_t s = 0; s < freq_.size(); ++s) {
    if (freq_[s] == 0) {
      throw AnsError("symbol " + std::to_string(s) + " has zero frequency");
    }
    cum_[s] = static_cast<uint32_t>(total);
    total += freq_[s];
    if (total > (uint64_t{1} << precision)) break;
  }
  if (total != (uint64_t{1} << precision)) {
    throw AnsError("frequencies do not sum to 2^" + std::to_string(precision));
  }
  cum_.back() = static_cast<uint32_t>(total);
}

uint32_t QuantizedDistribution::SymbolForSlot(uint32_t slot) const {
  auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), slot);
  return static_cast<uint32_t>(it - cum_.begin() - 1);
}

double QuantizedDistribution::InformationBits(uint32_t symbol) const {
  return static_cast<double>(precision_) - std::log2(freq_[symbol]);
}

QuantizedDistribution Quantize(std::span<const double> pmf,
                               unsigned precision) {
  detail::CheckPrecision(precision);
  const size_t n = pmf.size();
  if (n == 0) throw AnsError("cannot quantize an empty pmf");
  const uint64_t scale = uint64_t{1} << precision;
  if (n > scale) {
    throw AnsError("alphabet of " + std::to_string(n) +
                   " symbols does not fit in 2^" + std::to_string(precision));
  }
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw AnsError("pmf entries must be finite and nonnegative");
    }
    total += p;
  }
  if (!(total > 0.0)) throw AnsError("pmf has no positive mass");

  const uint64_t spare = scale - n;  // mass left after one unit per symbol
  const double factor = static_cast<double>(spare) / total;
  std::vector<uint32_t> freq(n);
  std::vector<double> remainder(n);
  uint64_t assigned = 0;
  for (size_t s = 0; s < n; ++s) {
    const double target = pmf[s] * factor;
    const double whole = std::floor(target);
    freq[s] = 1 + static_cast<uint32_t>(whole);
    remainder[s] = target - whole;
    assigned += static_cast<uint64_t>(whole);
  }

  // Largest remainder first, lowest index on ties.
  auto before = [&](uint32_t a, uint32_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  };
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  if (assigned < spare) {
    const size_t extra = static_cast<size_t>(spare - assigned);
    if (extra < n) {
      std::nth_element(order.begin(), order.begin() + extra, order.end(),
                       before);
    }
    for (size_t k = 0; k < extra; ++k) ++freq[order[k % n]];
  } else if (assigned > spare) {
    // Rounding pushed the floors over budget; take back from the smallest
    // remainders among symbols that can afford it.
    std::sort(order.begin(), order.end(), before);
    uint64_t excess = assigned - spare;
    while (excess > 0) {
      for (size_t k = n; k-- > 0 && excess > 0;) {
        if (freq[order[k]] > 1) {
          --freq[order[k]];
          --excess;
        }
      }
    }
  }
  return QuantizedDistribution(std::move(freq), precision);
}

ScalarAnsState Push(ScalarAnsState state, uint32_t symbol,
                    const QuantizedDistribution& dist) {
  if (symbol >= dist.size()) {
    throw AnsError("symbol " + std::to_string(symbol) + " outside alphabet of " +
                   std::to_string(dist.size()));
  }
  uint32_t word;
  if (detail::EncodeStep(state.head, dist.cumulative(symbol),
                         dist.frequency(symbol), dist.precision(), &word)) {
    state.stream.push_back(word);
  }
  return state;
}

std::pair<ScalarAnsState, uint32_t> Pop(ScalarAnsState state,
                                        const QuantizedDistribution& dist) {
  const uint32_t slot = detail::PeekSlot(state.head, dist.precision());
  const uint32_t symbol = dist.SymbolForSlot(slot);
  uint64_t head = state.head;
  if (detail::DecodeStep(head, dist.cumulative(symbol), dist.frequency(symbol),
                         dist.precision())) {
    if (state.stream.empty()) throw InsufficientBitsError(1);
    head = (head << 32) | state.stream.back();
    state.stream.pop_back();
  }
  state.head = head;
  return {std::move(state), symbol};
}

}  // namespace hllc
