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

#include "hllc/vector_ans.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#if defined(__AVX512F__) && defined(__AVX512DQ__) && defined(__AVX512VL__)
#include <immintrin.h>
#define HLLC_HAVE_AVX512 1
#else
#define HLLC_HAVE_AVX512 0
#endif

namespace hllc {
namespace {

// Head law tables: bucket = (bit_length - 33) * 16 + top 4 mantissa bits.
constexpr unsigned kHeadPrecision = 16;
constexpr unsigned kMantissaBits = 4;
constexpr unsigned kLengths = 32;  // bit lengths 33..64
constexpr unsigned kChunkBits = 16;
constexpr unsigned kMaxChunks = 4;  // ceil((64 - 1 - 4) / 16)

// A fold step codes one flag on lane 0 first: "every lane being folded is
// still at the empty-initial value". Such steps carry no lane data.
constexpr unsigned kFlagPrecision = 12;
constexpr LaneCode kPristineFlag{0, 1};
constexpr LaneCode kContentFlag{1, (1u << kFlagPrecision) - 1};

void CheckSpan(const ShapedMessage& msg, LaneSpan lanes, size_t codes) {
  if (lanes.offset + lanes.count > msg.lane_count() ||
      lanes.offset + lanes.count < lanes.offset) {
    throw AnsError("lane span [" + std::to_string(lanes.offset) + ", " +
                   std::to_string(lanes.offset + lanes.count) +
                   ") exceeds head of " + std::to_string(msg.lane_count()) +
                   " lanes");
  }
  if (codes != lanes.count) {
    throw AnsError("shape mismatch: " + std::to_string(codes) +
                   " values for " + std::to_string(lanes.count) + " lanes");
  }
}

std::atomic<bool> g_simd_enabled{true};

bool UseSimd() {
#if HLLC_HAVE_AVX512
  return g_simd_enabled.load(std::memory_order_relaxed);
#else
  return false;
#endif
}

// Where a lane's code comes from on push: an explicit per-lane array, or the
// lane's symbol looked up in a per-symbol table.
struct EncodeSource {
  const LaneCode* codes = nullptr;
  const uint32_t* symbols = nullptr;
  const LaneCode* table = nullptr;

  LaneCode at(size_t i) const { return codes ? codes[i] : table[symbols[i]]; }
};

// On pop the symbol is not known yet: either the caller supplies the codes,
// or the kernel looks each lane's slot up in a packed table (see SlotTable)
// and writes the symbol to `symbols`.
struct DecodeSource {
  const LaneCode* codes = nullptr;
  const uint64_t* slot_table = nullptr;
  uint32_t* symbols = nullptr;
};

// Slot table entries for precision <= 16: start in bits 0..23, frequency in
// bits 24..47, symbol in bits 48..63.
constexpr unsigned kSlotTableMaxPrecision = 16;
inline LaneCode EntryCode(uint64_t e) {
  return {static_cast<uint32_t>(e & 0xffffff),
          static_cast<uint32_t>((e >> 24) & 0xffffff)};
}
inline uint32_t EntrySymbol(uint64_t e) { return static_cast<uint32_t>(e >> 48); }

size_t EncodeScalar(uint64_t* head, const EncodeSource& src, size_t begin,
                    size_t n, unsigned precision, uint32_t* out,
                    size_t spilled) {
  for (size_t i = begin; i < n; ++i) {
    const LaneCode c = src.at(i);
    if (c.freq == 0) continue;
    uint32_t word = 0;
    const bool spill =
        detail::EncodeStep(head[i], c.start, c.freq, precision, &word);
    out[spilled] = word;
    spilled += spill;
  }
  return spilled;
}

#if HLLC_HAVE_AVX512
// 1 / f to within about one ulp: a 14-bit estimate and two Newton steps.
inline __m512d Reciprocal(__m512d f) {
  const __m512d one = _mm512_set1_pd(1.0);
  __m512d inv = _mm512_rcp14_pd(f);
  inv = _mm512_fmadd_pd(inv, _mm512_fnmadd_pd(f, inv, one), inv);
  return _mm512_fmadd_pd(inv, _mm512_fnmadd_pd(f, inv, one), inv);
}

// Eight lanes per step, bit-identical to EncodeStep. The quotient x / f comes
// from a floating-point estimate corrected with exact integer arithmetic.
// After renormalization x / f < 2^(64 - r), so the estimate is off by less
// than one when r >= 13 and a single correction step suffices; below that a
// second estimate of the remainder's quotient comes first.
template <bool kGather, bool kSingleCorrection>
size_t EncodeAvx512(uint64_t* head, const EncodeSource& src, size_t n,
                    unsigned precision, uint32_t* out) {
  static_assert(sizeof(LaneCode) == 8);
  const __m512i low32 = _mm512_set1_epi64(0xffffffff);
  const __m512i zero = _mm512_setzero_si512();
  const __m512i one = _mm512_set1_epi64(1);
  const __m128i shift_r = _mm_cvtsi32_si128(static_cast<int>(precision));
  const __m128i shift_limit =
      _mm_cvtsi32_si128(64 - static_cast<int>(precision));
  size_t spilled = 0;
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m512i code;
    if constexpr (kGather) {
      const __m256i sym = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(src.symbols + i));
      code = _mm512_i32gather_epi64(sym, src.table, 8);
    } else {
      code = _mm512_loadu_si512(src.codes + i);
    }
    const __m512i start = _mm512_and_si512(code, low32);
    const __m512i f = _mm512_srli_epi64(code, 32);
    const __mmask8 active =
        _mm512_test_epi64_mask(f, f) &
        _mm512_cmpeq_epi64_mask(_mm512_srl_epi64(f, shift_r), zero);
    if (active == 0) continue;
    __m512i x = _mm512_loadu_si512(head + i);
    const __mmask8 spill =
        active & _mm512_cmpge_epu64_mask(x, _mm512_sll_epi64(f, shift_limit));
    // Compress in a register and store all eight words; the caller's buffer
    // has a slot per lane, and a masked compress to memory is far slower.
    _mm256_storeu_si256(
        reinterpret_cast<__m256i*>(out + spilled),
        _mm256_maskz_compress_epi32(spill, _mm512_cvtepi64_epi32(x)));
    spilled += static_cast<size_t>(std::popcount(static_cast<unsigned>(spill)));
    x = _mm512_mask_srli_epi64(x, spill, x, 32);

    const __m512i fs = _mm512_mask_blend_epi64(active, one, f);
    const __m512d inv = Reciprocal(_mm512_cvtepu64_pd(fs));
    __m512i q = _mm512_cvttpd_epu64(_mm512_mul_pd(_mm512_cvtepu64_pd(x), inv));
    __m512i rem;
    if constexpr (kSingleCorrection) {
      // |x - q f| < 2 f < 2^25, so its low 32 bits determine it.
      const __m512i t = _mm512_sub_epi64(x, _mm512_mul_epu32(q, fs));
      rem = _mm512_srai_epi64(_mm512_slli_epi64(t, 32), 32);
    } else {
      const __m512i r0 = _mm512_sub_epi64(x, _mm512_mullo_epi64(q, fs));
      const __m512i q1 = _mm512_cvttpd_epi64(_mm512_roundscale_pd(
          _mm512_mul_pd(_mm512_cvtepi64_pd(r0), inv),
          _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC));
      q = _mm512_add_epi64(q, q1);
      rem = _mm512_sub_epi64(r0, _mm512_mullo_epi64(q1, fs));
    }
    const __mmask8 under = _mm512_cmplt_epi64_mask(rem, zero);
    q = _mm512_mask_sub_epi64(q, under, q, one);
    rem = _mm512_mask_add_epi64(rem, under, rem, fs);
    const __mmask8 over = _mm512_cmpge_epi64_mask(rem, fs);
    q = _mm512_mask_add_epi64(q, over, q, one);
    rem = _mm512_mask_sub_epi64(rem, over, rem, fs);
    const __m512i next = _mm512_add_epi64(
        _mm512_add_epi64(_mm512_sll_epi64(q, shift_r), rem), start);
    _mm512_mask_storeu_epi64(head + i, active, next);
  }
  return EncodeScalar(head, src, i, n, precision, out, spilled);
}
#endif

// Spilled words are appended in ascending lane order.
void EncodeLanes(uint64_t* head, const EncodeSource& src, size_t n,
                 unsigned precision, std::vector<uint32_t>& stream) {
  if (n <= 8) {
    for (size_t i = 0; i < n; ++i) {
      const LaneCode c = src.at(i);
      uint32_t word;
      if (c.freq != 0 &&
          detail::EncodeStep(head[i], c.start, c.freq, precision, &word)) {
        stream.push_back(word);
      }
    }
    return;
  }
  const size_t base = stream.size();
  // Eight spare slots for the full-width stores of the vector kernel.
  stream.resize(base + n + 8);
  uint32_t* out = stream.data() + base;
  size_t spilled;
#if HLLC_HAVE_AVX512
  if (UseSimd()) {
    const bool gather = src.codes == nullptr;
    if (precision >= 13) {
      spilled = gather ? EncodeAvx512<true, true>(head, src, n, precision, out)
                       : EncodeAvx512<false, true>(head, src, n, precision, out);
    } else {
      spilled = gather ? EncodeAvx512<true, false>(head, src, n, precision, out)
                       : EncodeAvx512<false, false>(head, src, n, precision, out);
    }
  } else {
    spilled = EncodeScalar(head, src, 0, n, precision, out, 0);
  }
#else
  spilled = EncodeScalar(head, src, 0, n, precision, out, 0);
#endif
  stream.resize(base + spilled);
}

// First pass of a pop: new heads before refill, and one refill mask per
// group of eight lanes. Returns the number of words needed.
size_t DecodeScalar(const uint64_t* head, const DecodeSource& src,
                    size_t begin, size_t n, unsigned precision, uint64_t* next,
                    uint8_t* masks) {
  const uint64_t slot_mask = (uint64_t{1} << precision) - 1;
  size_t needed = 0;
  for (size_t i = begin; i < n; ++i) {
    next[i] = head[i];
    LaneCode c;
    if (src.codes) {
      c = src.codes[i];
    } else {
      const uint64_t e = src.slot_table[head[i] & slot_mask];
      src.symbols[i] = EntrySymbol(e);
      c = EntryCode(e);
    }
    if (c.freq == 0) continue;
    const bool refill =
        detail::DecodeStep(next[i], c.start, c.freq, precision);
    masks[i / 8] |= static_cast<uint8_t>(refill << (i % 8));
    needed += refill;
  }
  return needed;
}

#if HLLC_HAVE_AVX512
template <bool kGather>
size_t DecodeAvx512(const uint64_t* head, const DecodeSource& src, size_t n,
                    unsigned precision, uint64_t* next, uint8_t* masks) {
  const __m512i low32 = _mm512_set1_epi64(0xffffffff);
  const __m512i low24 = _mm512_set1_epi64(0xffffff);
  const __m512i slot_mask =
      _mm512_set1_epi64(static_cast<long long>((uint64_t{1} << precision) - 1));
  const __m512i bound =
      _mm512_set1_epi64(static_cast<long long>(kHeadLowerBound));
  const __m128i shift_r = _mm_cvtsi32_si128(static_cast<int>(precision));
  size_t needed = 0;
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m512i x = _mm512_loadu_si512(head + i);
    const __m512i slot = _mm512_and_si512(x, slot_mask);
    __m512i start;
    __m512i f;
    if constexpr (kGather) {
      const __m512i e = _mm512_i64gather_epi64(slot, src.slot_table, 8);
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(src.symbols + i),
                          _mm512_cvtepi64_epi32(_mm512_srli_epi64(e, 48)));
      start = _mm512_and_si512(e, low24);
      f = _mm512_and_si512(_mm512_srli_epi64(e, 24), low24);
    } else {
      const __m512i code = _mm512_loadu_si512(src.codes + i);
      start = _mm512_and_si512(code, low32);
      f = _mm512_srli_epi64(code, 32);
    }
    const __mmask8 active = _mm512_test_epi64_mask(f, f);
    const __m512i decoded = _mm512_sub_epi64(
        _mm512_add_epi64(_mm512_mullo_epi64(f, _mm512_srl_epi64(x, shift_r)),
                         slot),
        start);
    const __m512i out = _mm512_mask_blend_epi64(active, x, decoded);
    const __mmask8 refill = active & _mm512_cmplt_epu64_mask(out, bound);
    _mm512_storeu_si512(next + i, out);
    masks[i / 8] = refill;
    needed += static_cast<size_t>(std::popcount(static_cast<unsigned>(refill)));
  }
  return needed + DecodeScalar(head, src, i, n, precision, next, masks);
}
#endif

// Refills in descending lane order, then commits. Leaves the head and stream
// untouched when the stream is short.
void DecodeLanes(uint64_t* head, const DecodeSource& src, size_t n,
                 unsigned precision, std::vector<uint32_t>& stream) {
  if (n <= 8) {
    uint64_t next[8];
    uint8_t mask = 0;
    const size_t needed = DecodeScalar(head, src, 0, n, precision, next, &mask);
    if (needed > stream.size()) {
      throw InsufficientBitsError(needed - stream.size());
    }
    size_t top = stream.size();
    for (size_t j = n; j-- > 0;) {
      if (mask & (1u << j)) next[j] = (next[j] << 32) | stream[--top];
    }
    std::copy(next, next + n, head);
    stream.resize(top);
    return;
  }
  constexpr size_t kSmall = 64;
  uint64_t next_small[kSmall];
  uint8_t masks_small[kSmall / 8] = {};
  thread_local std::vector<uint64_t> next_large;
  thread_local std::vector<uint8_t> masks_large;
  uint64_t* next = next_small;
  uint8_t* masks = masks_small;
  const size_t groups = (n + 7) / 8;
  if (n > kSmall) {
    next_large.resize(n);
    masks_large.assign(groups, 0);
    next = next_large.data();
    masks = masks_large.data();
  }
  size_t needed;
  const bool simd = UseSimd();
#if HLLC_HAVE_AVX512
  if (simd) {
    needed = src.codes
                 ? DecodeAvx512<false>(head, src, n, precision, next,
                                       masks)
                 : DecodeAvx512<true>(head, src, n, precision, next,
                                      masks);
  } else {
    needed = DecodeScalar(head, src, 0, n, precision, next, masks);
  }
#else
  needed = DecodeScalar(head, src, 0, n, precision, next, masks);
#endif
  if (needed > stream.size()) {
    throw InsufficientBitsError(needed - stream.size());
  }
  size_t top = stream.size();
  for (size_t g = groups; g-- > 0;) {
    const unsigned m = masks[g];
    if (m == 0) continue;
    const size_t lane0 = 8 * g;
#if HLLC_HAVE_AVX512
    if (simd && lane0 + 8 <= n) {
      // The lowest refilling lane takes the deepest of this group's words.
      const size_t base = top - static_cast<size_t>(std::popcount(m));
      const __m256i words = _mm256_maskz_expandloadu_epi32(
          static_cast<__mmask8>(m), stream.data() + base);
      __m512i v = _mm512_loadu_si512(next + lane0);
      v = _mm512_mask_or_epi64(v, static_cast<__mmask8>(m),
                               _mm512_slli_epi64(v, 32),
                               _mm512_cvtepu32_epi64(words));
      _mm512_storeu_si512(next + lane0, v);
      top = base;
      continue;
    }
#endif
    for (size_t j = 8; j-- > 0;) {
      if (m & (1u << j)) {
        uint64_t& v = next[lane0 + j];
        v = (v << 32) | stream[--top];
      }
    }
  }
  std::copy(next, next + n, head);
  stream.resize(top);
}

// Scratch codes: on the stack for a few lanes, else a per-thread vector.
class LaneCodeBuffer {
 public:
  explicit LaneCodeBuffer(size_t n) {
    if (n > kSmall) {
      thread_local std::vector<LaneCode> large;
      large.resize(n);
      data_ = large.data();
    }
  }
  LaneCode* data() { return data_; }

 private:
  static constexpr size_t kSmall = 64;
  // Left uninitialized; callers fill every lane they use.
  union Storage {
    Storage() {}
    LaneCode codes[kSmall];
  } small_;
  LaneCode* data_ = small_.codes;
};

// Per-symbol codes of `d`, rebuilt per call.
const LaneCode* CodeTable(const QuantizedDistribution& d) {
  thread_local std::vector<LaneCode> table;
  table.resize(d.size());
  for (uint32_t s = 0; s < d.size(); ++s) {
    table[s] = {d.cumulative(s), d.frequency(s)};
  }
  return table.data();
}

// Packed slot table for a broadcast distribution, kept per thread for the
// most recent distribution.
const uint64_t* SlotTable(const QuantizedDistribution& d) {
  thread_local std::vector<uint32_t> freqs;
  thread_local unsigned precision = 0;
  thread_local std::vector<uint64_t> table;
  if (precision != d.precision() ||
      !std::equal(freqs.begin(), freqs.end(), d.frequencies().begin(),
                  d.frequencies().end())) {
    freqs.assign(d.frequencies().begin(), d.frequencies().end());
    precision = d.precision();
    table.resize(size_t{1} << precision);
    for (uint32_t s = 0; s < d.size(); ++s) {
      const uint64_t e = uint64_t{d.cumulative(s)} |
                         (uint64_t{d.frequency(s)} << 24) |
                         (uint64_t{s} << 48);
      std::fill_n(table.begin() + d.cumulative(s), d.frequency(s), e);
    }
  }
  return table.data();
}

unsigned PrecisionOf(std::span<const QuantizedDistribution> dists) {
  if (dists.empty()) throw AnsError("no distributions given");
  const unsigned precision = dists[0].precision();
  for (const auto& d : dists) {
    if (d.precision() != precision) {
      throw AnsError("per-lane distributions must share one precision");
    }
  }
  return precision;
}

void CheckDistCount(std::span<const QuantizedDistribution> dists,
                    size_t lanes) {
  if (dists.size() != 1 && dists.size() != lanes) {
    throw AnsError("shape mismatch: " + std::to_string(dists.size()) +
                   " distributions for " + std::to_string(lanes) + " lanes");
  }
}

struct HeadParts {
  uint32_t bucket;
  unsigned low_bits;
  uint64_t low;
};

HeadParts SplitHead(uint64_t h) {
  const unsigned length = static_cast<unsigned>(std::bit_width(h));
  const unsigned low_bits = length - 1 - kMantissaBits;
  const uint32_t mantissa = static_cast<uint32_t>(h >> low_bits) & 15u;
  return {(length - 33) * 16 + mantissa, low_bits,
          h & ((uint64_t{1} << low_bits) - 1)};
}

unsigned LowBitsOfBucket(uint32_t bucket) {
  return bucket / 16 + 33 - 1 - kMantissaBits;
}

uint64_t JoinHead(uint32_t bucket, uint64_t low) {
  const unsigned low_bits = LowBitsOfBucket(bucket);
  const uint64_t top = (uint64_t{16} | (bucket & 15u)) << low_bits;
  return top | low;
}

unsigned ChunkWidth(unsigned low_bits, unsigned chunk) {
  const unsigned begin = chunk * kChunkBits;
  if (begin >= low_bits) return 0;
  return std::min(kChunkBits, low_bits - begin);
}

// Encodes values[i] onto lane i of the message, i < values.size().
void PushHeadValues(ShapedMessage& msg, std::span<const uint64_t> values) {
  const size_t k = values.size();
  std::vector<HeadParts> parts(k);
  for (size_t i = 0; i < k; ++i) parts[i] = SplitHead(values[i]);
  std::vector<LaneCode> codes(k);
  for (unsigned chunk = kMaxChunks; chunk-- > 0;) {
    for (size_t i = 0; i < k; ++i) {
      const unsigned width = ChunkWidth(parts[i].low_bits, chunk);
      if (width == 0) {
        codes[i] = {};
        continue;
      }
      const uint32_t value = static_cast<uint32_t>(
          (parts[i].low >> (chunk * kChunkBits)) & ((1u << width) - 1));
      const unsigned pad = kHeadPrecision - width;
      codes[i] = {value << pad, 1u << pad};
    }
    PushLanes(msg, {0, k}, codes, kHeadPrecision);
  }
  const QuantizedDistribution& law = HeadBucketDistribution();
  for (size_t i = 0; i < k; ++i) {
    codes[i] = {law.cumulative(parts[i].bucket),
                law.frequency(parts[i].bucket)};
  }
  PushLanes(msg, {0, k}, codes, kHeadPrecision);
}

std::vector<uint64_t> PopHeadValues(ShapedMessage& msg, size_t k) {
  const QuantizedDistribution& law = HeadBucketDistribution();
  const std::vector<uint32_t> buckets =
      VPopInPlace(msg, {0, k}, std::span(&law, 1));
  std::vector<uint64_t> low(k, 0);
  std::vector<uint32_t> slots(k);
  std::vector<LaneCode> codes(k);
  for (unsigned chunk = 0; chunk < kMaxChunks; ++chunk) {
    PeekSlots(msg, {0, k}, kHeadPrecision, slots);
    for (size_t i = 0; i < k; ++i) {
      const unsigned width = ChunkWidth(LowBitsOfBucket(buckets[i]), chunk);
      if (width == 0) {
        codes[i] = {};
        continue;
      }
      const unsigned pad = kHeadPrecision - width;
      const uint32_t value = slots[i] >> pad;
      codes[i] = {value << pad, 1u << pad};
      low[i] |= uint64_t{value} << (chunk * kChunkBits);
    }
    PopLanes(msg, {0, k}, codes, kHeadPrecision);
  }
  std::vector<uint64_t> values(k);
  for (size_t i = 0; i < k; ++i) values[i] = JoinHead(buckets[i], low[i]);
  return values;
}

}  // namespace

HeadShape::HeadShape(std::vector<size_t> dims)
    : HeadShape(std::vector<std::vector<size_t>>{std::move(dims)}) {}

HeadShape::HeadShape(std::vector<std::vector<size_t>> leaves)
    : leaves_(std::move(leaves)) {
  if (leaves_.empty()) throw AnsError("head shape needs at least one leaf");
  lanes_ = 0;
  for (const auto& leaf : leaves_) {
    size_t n = 1;
    for (size_t d : leaf) {
      if (d == 0) throw AnsError("head shape dimensions must be positive");
      n *= d;
    }
    lanes_ += n;
  }
}

HeadShape HeadShape::Flat(size_t lanes) {
  return HeadShape(std::vector<size_t>{lanes});
}

size_t HeadShape::leaf_size(size_t leaf) const {
  size_t n = 1;
  for (size_t d : leaves_.at(leaf)) n *= d;
  return n;
}

size_t HeadShape::leaf_offset(size_t leaf) const {
  size_t offset = 0;
  for (size_t i = 0; i < leaf; ++i) offset += leaf_size(i);
  return offset;
}

ShapedMessage::ShapedMessage(HeadShape shape)
    : shape_(std::move(shape)), head_(shape_.lane_count(), kHeadLowerBound) {}

ShapedMessage::ShapedMessage(HeadShape shape, std::vector<uint64_t> head,
                             std::vector<uint32_t> stream)
    : shape_(std::move(shape)),
      head_(std::move(head)),
      stream_(std::move(stream)),
      low_water_(stream_.size()) {
  if (head_.size() != shape_.lane_count()) {
    throw AnsError("head has " + std::to_string(head_.size()) +
                   " lanes but shape has " +
                   std::to_string(shape_.lane_count()));
  }
  for (uint64_t h : head_) {
    if (h < kHeadLowerBound) throw AnsError("head lane below 2^32");
  }
}

uint64_t ShapedMessage::LengthBits() const {
  return 64 * uint64_t{head_.size()} + 32 * uint64_t{stream_.size()};
}

double ShapedMessage::InformationBits() const {
  double bits = 32.0 * static_cast<double>(stream_.size());
  for (uint64_t h : head_) bits += std::log2(static_cast<double>(h));
  return bits;
}

void PushLanes(ShapedMessage& msg, LaneSpan lanes,
               std::span<const LaneCode> codes, unsigned precision) {
  detail::CheckPrecision(precision);
  CheckSpan(msg, lanes, codes.size());
  EncodeSource src;
  src.codes = codes.data();
  EncodeLanes(msg.mutable_head().data() + lanes.offset, src, lanes.count,
              precision, msg.mutable_stream());
}

void PeekSlots(const ShapedMessage& msg, LaneSpan lanes, unsigned precision,
               std::span<uint32_t> slots) {
  detail::CheckPrecision(precision);
  CheckSpan(msg, lanes, slots.size());
  const uint64_t* head = msg.head().data() + lanes.offset;
  for (size_t i = 0; i < lanes.count; ++i) {
    slots[i] = detail::PeekSlot(head[i], precision);
  }
}

void PopLanes(ShapedMessage& msg, LaneSpan lanes,
              std::span<const LaneCode> codes, unsigned precision) {
  detail::CheckPrecision(precision);
  CheckSpan(msg, lanes, codes.size());
  DecodeSource src;
  src.codes = codes.data();
  DecodeLanes(msg.mutable_head().data() + lanes.offset, src, lanes.count,
              precision, msg.mutable_stream());
  msg.NoteStreamSize();
}

void VPushInPlace(ShapedMessage& msg, LaneSpan lanes,
                  std::span<const uint32_t> symbols,
                  std::span<const QuantizedDistribution> dists) {
  CheckSpan(msg, lanes, symbols.size());
  CheckDistCount(dists, lanes.count);
  const unsigned precision = PrecisionOf(dists);
  auto out_of_range = [&](size_t i, size_t size) {
    return AnsError("symbol " + std::to_string(symbols[i]) +
                    " outside alphabet of " + std::to_string(size) +
                    " at lane " + std::to_string(lanes.offset + i));
  };
  EncodeSource src;
  LaneCodeBuffer buffer(lanes.count);
  LaneCode* codes = buffer.data();
  if (dists.size() == 1) {
    const QuantizedDistribution& d = dists[0];
    uint32_t top = 0;
    for (uint32_t v : symbols) top = std::max(top, v);
    if (top >= d.size()) {
      for (size_t i = 0;; ++i) {
        if (symbols[i] >= d.size()) throw out_of_range(i, d.size());
      }
    }
    if (lanes.count >= d.size() / 4) {
      src.symbols = symbols.data();
      src.table = CodeTable(d);
    } else {
      for (size_t i = 0; i < lanes.count; ++i) {
        codes[i] = {d.cumulative(symbols[i]), d.frequency(symbols[i])};
      }
      src.codes = codes;
    }
  } else {
    for (size_t i = 0; i < lanes.count; ++i) {
      const QuantizedDistribution& d = dists[i];
      if (symbols[i] >= d.size()) throw out_of_range(i, d.size());
      codes[i] = {d.cumulative(symbols[i]), d.frequency(symbols[i])};
    }
    src.codes = codes;
  }
  EncodeLanes(msg.mutable_head().data() + lanes.offset, src, lanes.count,
              precision, msg.mutable_stream());
}

void VPopInPlace(ShapedMessage& msg, LaneSpan lanes,
                 std::span<const QuantizedDistribution> dists,
                 std::span<uint32_t> symbols) {
  CheckSpan(msg, lanes, symbols.size());
  CheckDistCount(dists, lanes.count);
  const unsigned precision = PrecisionOf(dists);
  const uint64_t* head = msg.head().data() + lanes.offset;
  const uint64_t slot_mask = (uint64_t{1} << precision) - 1;
  DecodeSource src;
  LaneCodeBuffer buffer(lanes.count);
  LaneCode* codes = buffer.data();
  const bool broadcast = dists.size() == 1;
  if (broadcast && precision <= kSlotTableMaxPrecision &&
      lanes.count >= (size_t{1} << precision) / 16) {
    src.slot_table = SlotTable(dists[0]);
    src.symbols = symbols.data();
  } else {
    for (size_t i = 0; i < lanes.count; ++i) {
      const QuantizedDistribution& d = broadcast ? dists[0] : dists[i];
      const uint32_t s =
          d.SymbolForSlot(static_cast<uint32_t>(head[i] & slot_mask));
      symbols[i] = s;
      codes[i] = {d.cumulative(s), d.frequency(s)};
    }
    src.codes = codes;
  }
  DecodeLanes(msg.mutable_head().data() + lanes.offset, src, lanes.count,
              precision, msg.mutable_stream());
  msg.NoteStreamSize();
}

std::vector<uint32_t> VPopInPlace(
    ShapedMessage& msg, LaneSpan lanes,
    std::span<const QuantizedDistribution> dists) {
  std::vector<uint32_t> symbols(lanes.count);
  VPopInPlace(msg, lanes, dists, symbols);
  return symbols;
}

ShapedMessage VPush(ShapedMessage msg, std::span<const uint32_t> symbols,
                    std::span<const QuantizedDistribution> dists) {
  VPushInPlace(msg, msg.all_lanes(), symbols, dists);
  return msg;
}

std::pair<ShapedMessage, std::vector<uint32_t>> VPop(
    ShapedMessage msg, std::span<const QuantizedDistribution> dists) {
  auto symbols = VPopInPlace(msg, msg.all_lanes(), dists);
  return {std::move(msg), std::move(symbols)};
}

const QuantizedDistribution& HeadBucketDistribution() {
  static const QuantizedDistribution law = [] {
    // Mass of a bucket is width / midpoint, which only depends on the
    // mantissa: every bit length gets the same total.
    std::vector<double> mass(kLengths * 16);
    for (unsigned length = 0; length < kLengths; ++length) {
      for (unsigned m = 0; m < 16; ++m) {
        mass[length * 16 + m] = 1.0 / (16.0 + m + 0.5);
      }
    }
    return Quantize(mass, kHeadPrecision);
  }();
  return law;
}

std::vector<size_t> ResizeSchedule(size_t from, size_t to) {
  if (from == 0 || to == 0) throw AnsError("lane counts must be positive");
  if (to > from) {
    std::vector<size_t> steps = ResizeSchedule(to, from);
    std::reverse(steps.begin(), steps.end());
    return steps;
  }
  std::vector<size_t> steps{from};
  for (size_t n = from; n > to;) {
    n = std::max(to, (n + 1) / 2);
    steps.push_back(n);
  }
  return steps;
}

size_t WorstCaseGrowWords(size_t from, size_t to) {
  if (to <= from) return 0;
  // One flag pop per step, then one bucket and up to four chunk pops per new
  // lane; every pop consumes at most one word.
  return ResizeStepCount(from, to) + (1 + kMaxChunks) * (to - from);
}

ShapedMessage ReshapeHead(ShapedMessage msg, const HeadShape& new_shape) {
  const std::vector<size_t> steps =
      ResizeSchedule(msg.lane_count(), new_shape.lane_count());
  for (size_t s = 1; s < steps.size(); ++s) {
    const size_t current = steps[s - 1];
    const size_t next = steps[s];
    msg.shape_ = HeadShape::Flat(current);
    if (next < current) {
      const size_t k = current - next;
      std::span<const uint64_t> upper(msg.head_.data() + next, k);
      const bool pristine = std::all_of(
          upper.begin(), upper.end(),
          [](uint64_t h) { return h == kHeadLowerBound; });
      if (!pristine) {
        std::vector<uint64_t> values(upper.begin(), upper.end());
        PushHeadValues(msg, values);
      }
      const LaneCode flag = pristine ? kPristineFlag : kContentFlag;
      PushLanes(msg, {0, 1}, std::span(&flag, 1), kFlagPrecision);
      msg.head_.resize(next);
    } else {
      const size_t k = next - current;
      uint32_t slot = 0;
      PeekSlots(msg, {0, 1}, kFlagPrecision, std::span(&slot, 1));
      const bool pristine = slot == 0;
      const LaneCode flag = pristine ? kPristineFlag : kContentFlag;
      PopLanes(msg, {0, 1}, std::span(&flag, 1), kFlagPrecision);
      if (pristine) {
        msg.head_.resize(next, kHeadLowerBound);
      } else {
        std::vector<uint64_t> values = PopHeadValues(msg, k);
        // A content step whose lanes all decode to the empty value has no
        // preimage under folding (folding would code it as pristine).
        if (std::all_of(values.begin(), values.end(),
                        [](uint64_t h) { return h == kHeadLowerBound; })) {
          throw AnsError("non-canonical folded head: content step decoded "
                         "only empty-initial lanes");
        }
        msg.head_.insert(msg.head_.end(), values.begin(), values.end());
      }
    }
  }
  msg.shape_ = new_shape;
  return msg;
}

std::vector<uint32_t> Flatten(ShapedMessage msg) {
  msg = ReshapeHead(std::move(msg), HeadShape::Flat(1));
  std::vector<uint32_t> words = std::move(msg.mutable_stream());
  const uint64_t h = msg.head()[0];
  words.push_back(static_cast<uint32_t>(h));
  words.push_back(static_cast<uint32_t>(h >> 32));
  return words;
}

ShapedMessage Unflatten(std::span<const uint32_t> words,
                        const HeadShape& shape) {
  if (words.size() < 2) throw InsufficientBitsError(2 - words.size());
  const size_t n = words.size();
  const uint64_t h = uint64_t{words[n - 2]} | (uint64_t{words[n - 1]} << 32);
  if (h < kHeadLowerBound) {
    throw AnsError("last two words do not form a valid head (high word 0)");
  }
  ShapedMessage msg(HeadShape::Flat(1), {h},
                    std::vector<uint32_t>(words.begin(), words.end() - 2));
  return ReshapeHead(std::move(msg), shape);
}

namespace detail {

bool SimdKernelsAvailable() { return HLLC_HAVE_AVX512 != 0; }

void SetSimdKernelsEnabled(bool enabled) {
  g_simd_enabled.store(enabled, std::memory_order_relaxed);
}

}  // namespace detail
}  // namespace hllc
