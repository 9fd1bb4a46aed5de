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

// Vectorized ANS: a head of many 64-bit lanes sharing one word stream.
//
// Lanes that spill during a push write their words in ascending flat lane
// order; pops refill in descending order, so a pop is the exact inverse of
// the matching push on every platform.
//
// The head can be resized by folding: the upper part of the lane vector is
// encoded onto the lower part under the p(h) ~ 1/h head law, and grown back
// by decoding new lanes from that law. Flatten folds down to one lane and
// emits the stream followed by the two head words.

#ifndef HLLC_VECTOR_ANS_H_
#define HLLC_VECTOR_ANS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hllc/ans.h"

namespace hllc {

// A nested head shape, stored as its leaves in flat lane order. A VAE head is
// typically (x-shape, z1-shape, ..., zL-shape).
class HeadShape {
 public:
  HeadShape() : HeadShape(Flat(1)) {}
  explicit HeadShape(std::vector<size_t> dims);
  explicit HeadShape(std::vector<std::vector<size_t>> leaves);
  static HeadShape Flat(size_t lanes);

  size_t leaf_count() const { return leaves_.size(); }
  std::span<const size_t> leaf_dims(size_t leaf) const {
    return leaves_.at(leaf);
  }
  size_t leaf_size(size_t leaf) const;
  size_t leaf_offset(size_t leaf) const;
  size_t lane_count() const { return lanes_; }

  friend bool operator==(const HeadShape& a, const HeadShape& b) {
    return a.leaves_ == b.leaves_;
  }

 private:
  std::vector<std::vector<size_t>> leaves_;
  size_t lanes_ = 0;
};

// Contiguous run of lanes [offset, offset + count).
struct LaneSpan {
  size_t offset = 0;
  size_t count = 0;
  friend bool operator==(const LaneSpan&, const LaneSpan&) = default;
};

// Slot range for one lane; freq == 0 leaves the lane untouched.
struct LaneCode {
  uint32_t start = 0;
  uint32_t freq = 0;
};

class ShapedMessage {
 public:
  // Every lane at the empty-initial value 2^32, empty stream.
  explicit ShapedMessage(HeadShape shape = HeadShape());
  // Throws AnsError if the lane count disagrees with the shape or a lane is
  // outside [2^32, 2^64).
  ShapedMessage(HeadShape shape, std::vector<uint64_t> head,
                std::vector<uint32_t> stream);

  const HeadShape& shape() const { return shape_; }
  size_t lane_count() const { return head_.size(); }
  LaneSpan all_lanes() const { return {0, head_.size()}; }
  std::span<const uint64_t> head() const { return head_; }
  std::span<uint64_t> mutable_head() { return head_; }
  const std::vector<uint32_t>& stream() const { return stream_; }
  std::vector<uint32_t>& mutable_stream() { return stream_; }

  // 64 bits per lane plus 32 per stream word.
  uint64_t LengthBits() const;
  // 32 bits per word plus log2 of every lane: the length without the unused
  // top of each head register.
  double InformationBits() const;

  // Smallest stream size left by a pop since the last reset. Words below it
  // were never read.
  size_t stream_low_water() const { return low_water_; }
  void ResetStreamLowWater() { low_water_ = stream_.size(); }
  void NoteStreamSize() { low_water_ = std::min(low_water_, stream_.size()); }

  // Compares shape, head and stream.
  friend bool operator==(const ShapedMessage& a, const ShapedMessage& b) {
    return a.shape_ == b.shape_ && a.head_ == b.head_ && a.stream_ == b.stream_;
  }

 private:
  friend ShapedMessage ReshapeHead(ShapedMessage, const HeadShape&);
  HeadShape shape_;
  std::vector<uint64_t> head_;
  std::vector<uint32_t> stream_;
  size_t low_water_ = 0;
};

// Low-level lane kernels. `codes` has one entry per lane in `lanes`.
void PushLanes(ShapedMessage& msg, LaneSpan lanes,
               std::span<const LaneCode> codes, unsigned precision);
void PeekSlots(const ShapedMessage& msg, LaneSpan lanes, unsigned precision,
               std::span<uint32_t> slots);
// Each code must contain the lane's current slot. Throws
// InsufficientBitsError, leaving msg untouched, if the stream runs dry.
void PopLanes(ShapedMessage& msg, LaneSpan lanes,
              std::span<const LaneCode> codes, unsigned precision);

// Push one symbol per lane of `lanes`. `dists` holds one distribution per
// lane, or a single distribution broadcast over all of them; all must share
// a precision.
void VPushInPlace(ShapedMessage& msg, LaneSpan lanes,
                  std::span<const uint32_t> symbols,
                  std::span<const QuantizedDistribution> dists);
std::vector<uint32_t> VPopInPlace(ShapedMessage& msg, LaneSpan lanes,
                                  std::span<const QuantizedDistribution> dists);
// Same, writing one symbol per lane into `symbols`.
void VPopInPlace(ShapedMessage& msg, LaneSpan lanes,
                 std::span<const QuantizedDistribution> dists,
                 std::span<uint32_t> symbols);

// Whole-head value forms.
ShapedMessage VPush(ShapedMessage msg, std::span<const uint32_t> symbols,
                    std::span<const QuantizedDistribution> dists);
std::pair<ShapedMessage, std::vector<uint32_t>> VPop(
    ShapedMessage msg, std::span<const QuantizedDistribution> dists);

// The quantized 1/h law over head buckets used by folds: 32 bit-lengths times
// 16 mantissa buckets, precision 16.
const QuantizedDistribution& HeadBucketDistribution();

// Lane counts visited when resizing from `from` lanes to `to` lanes. Growing
// visits the shrink sequence in reverse, so a grow undoes the matching shrink
// and vice versa.
std::vector<size_t> ResizeSchedule(size_t from, size_t to);
inline size_t ResizeStepCount(size_t from, size_t to) {
  return ResizeSchedule(from, to).size() - 1;
}
// Upper bound on stream words a grow from `from` to `to` lanes can consume.
size_t WorstCaseGrowWords(size_t from, size_t to);

// Fold or unfold to the lane count of `new_shape`, then adopt it.
ShapedMessage ReshapeHead(ShapedMessage msg, const HeadShape& new_shape);

// Fold to one lane; emit the stream (bottom first) then head low, head high.
std::vector<uint32_t> Flatten(ShapedMessage msg);
// Inverse of Flatten. Also accepts arbitrary seed words, in which case the
// last two words form the initial head. Throws InsufficientBitsError when
// the words cannot support growing to `shape`.
ShapedMessage Unflatten(std::span<const uint32_t> words, const HeadShape& shape);

namespace detail {
// Whether the library was built with the AVX-512 lane kernels. Disabling
// them (process-wide) selects the portable loops; results are identical.
bool SimdKernelsAvailable();
void SetSimdKernelsEnabled(bool enabled);
}  // namespace detail

}  // namespace hllc

#endif  // HLLC_VECTOR_ANS_H_
