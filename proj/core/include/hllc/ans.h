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

// Scalar range-ANS with a 64-bit head and a stack of 32-bit words.
//
// The head always lives in [2^32, 2^64). A push that would leave the head
// above f * 2^(64 - r) first moves the low 32 bits onto the stream; a pop
// that leaves the head below 2^32 pulls one word back. Both directions touch
// at most one word, and all arithmetic is on integers.

#ifndef HLLC_ANS_H_
#define HLLC_ANS_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hllc {

inline constexpr uint64_t kHeadLowerBound = uint64_t{1} << 32;
inline constexpr unsigned kMaxPrecision = 24;
inline constexpr unsigned kDefaultPrecision = 16;

class AnsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a pop needs a stream word and none is left. In a bits-back
// chain this means the initial buffer was too small.
class InsufficientBitsError : public AnsError {
 public:
  explicit InsufficientBitsError(size_t words_needed)
      : AnsError("insufficient bits: pop needs " +
                 std::to_string(words_needed) +
                 " more stream word(s); seed the message with a larger "
                 "initial buffer"),
        words_needed_(words_needed) {}
  size_t words_needed() const { return words_needed_; }

 private:
  size_t words_needed_;
};

// Integer frequencies summing to exactly 2^precision, every entry >= 1.
class QuantizedDistribution {
 public:
  QuantizedDistribution() = default;
  // Validates the invariants; throws AnsError on violation.
  QuantizedDistribution(std::vector<uint32_t> frequencies, unsigned precision);

  size_t size() const { return freq_.size(); }
  unsigned precision() const { return precision_; }
  uint32_t frequency(uint32_t symbol) const { return freq_[symbol]; }
  // Exclusive prefix sum; cumulative(size()) == 2^precision.
  uint32_t cumulative(uint32_t symbol) const { return cum_[symbol]; }
  std::span<const uint32_t> frequencies() const { return freq_; }
  std::span<const uint32_t> cumulatives() const { return cum_; }

  // The unique symbol s with cumulative(s) <= slot < cumulative(s + 1).
  uint32_t SymbolForSlot(uint32_t slot) const;

  // Information content of `symbol` in bits: log2(2^r / f).
  double InformationBits(uint32_t symbol) const;

  friend bool operator==(const QuantizedDistribution&,
                         const QuantizedDistribution&) = default;

 private:
  std::vector<uint32_t> freq_;
  std::vector<uint32_t> cum_;
  unsigned precision_ = 0;
};

// Largest-remainder apportionment of `pmf` onto 2^precision after reserving
// one unit per symbol. Ties go to the lower symbol index.
QuantizedDistribution Quantize(std::span<const double> pmf,
                               unsigned precision = kDefaultPrecision);

struct ScalarAnsState {
  uint64_t head = kHeadLowerBound;
  std::vector<uint32_t> stream;

  bool IsEmptyInitial() const {
    return head == kHeadLowerBound && stream.empty();
  }
  // 64 bits of head plus 32 per stream word.
  uint64_t LengthBits() const { return 64 + 32 * uint64_t{stream.size()}; }

  friend bool operator==(const ScalarAnsState&,
                         const ScalarAnsState&) = default;
};

ScalarAnsState Push(ScalarAnsState state, uint32_t symbol,
                    const QuantizedDistribution& dist);
std::pair<ScalarAnsState, uint32_t> Pop(ScalarAnsState state,
                                        const QuantizedDistribution& dist);

namespace detail {

// One encode step on a head register. Returns true and stores the spilled
// low word in *word when the head had to be renormalized first.
inline bool EncodeStep(uint64_t& head, uint32_t start, uint32_t freq,
                       unsigned precision, uint32_t* word) {
  if ((freq >> precision) != 0) return false;  // freq == 2^r: zero bits.
  bool spilled = false;
  uint64_t x = head;
  if (x >= (uint64_t{freq} << (64 - precision))) {
    *word = static_cast<uint32_t>(x);
    x >>= 32;
    spilled = true;
  }
  const uint64_t q = x / freq;
  head = (q << precision) + (x - q * freq) + start;
  return spilled;
}

// Undoes EncodeStep except for the refill; returns true when the caller must
// shift in one stream word.
inline bool DecodeStep(uint64_t& head, uint32_t start, uint32_t freq,
                       unsigned precision) {
  const uint64_t mask = (uint64_t{1} << precision) - 1;
  const uint64_t slot = head & mask;
  head = freq * (head >> precision) + slot - start;
  return head < kHeadLowerBound;
}

inline uint32_t PeekSlot(uint64_t head, unsigned precision) {
  return static_cast<uint32_t>(head & ((uint64_t{1} << precision) - 1));
}

void CheckPrecision(unsigned precision);

}  // namespace detail
}  // namespace hllc

#endif  // HLLC_ANS_H_
