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

#include "hllc/codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace hllc {

ViewLens ViewLens::Leaf(size_t leaf) {
  ViewLens lens;
  lens.steps_.push_back({true, leaf, 0});
  return lens;
}

ViewLens ViewLens::Slice(size_t begin, size_t count) {
  ViewLens lens;
  lens.steps_.push_back({false, begin, count});
  return lens;
}

ViewLens ViewLens::Then(const ViewLens& inner) const {
  ViewLens lens = *this;
  lens.steps_.insert(lens.steps_.end(), inner.steps_.begin(),
                     inner.steps_.end());
  return lens;
}

LaneSpan ViewLens::Resolve(const HeadShape& shape) const {
  return Resolve(shape, {0, shape.lane_count()});
}

LaneSpan ViewLens::Resolve(const HeadShape& shape, LaneSpan parent) const {
  LaneSpan span = parent;
  for (size_t k = 0; k < steps_.size(); ++k) {
    const Step& s = steps_[k];
    if (s.leaf) {
      if (k != 0 || s.a >= shape.leaf_count()) {
        throw AnsError("leaf lens must come first and name an existing leaf");
      }
      span = {shape.leaf_offset(s.a), shape.leaf_size(s.a)};
    } else {
      if (s.a + s.b > span.count) {
        throw AnsError("slice lens [" + std::to_string(s.a) + ", " +
                       std::to_string(s.a + s.b) + ") exceeds " +
                       std::to_string(span.count) + " lanes");
      }
      span = {span.offset + s.a, s.b};
    }
  }
  return span;
}

std::vector<uint64_t> ViewLens::Read(const ShapedMessage& msg) const {
  const LaneSpan span = Resolve(msg.shape());
  auto head = msg.head().subspan(span.offset, span.count);
  return {head.begin(), head.end()};
}

void ViewLens::Write(ShapedMessage& msg,
                     std::span<const uint64_t> lanes) const {
  const LaneSpan span = Resolve(msg.shape());
  if (lanes.size() != span.count) {
    throw AnsError("lens write: lane count mismatch");
  }
  for (uint64_t h : lanes) {
    if (h < kHeadLowerBound) throw AnsError("lens write: lane below 2^32");
  }
  std::copy(lanes.begin(), lanes.end(),
            msg.mutable_head().begin() + span.offset);
}

SymbolCodec UniformCodec(uint32_t n) {
  if (n == 0 || n > (1u << kMaxPrecision)) {
    throw AnsError("uniform codec size must be in [1, 2^24], got " +
                   std::to_string(n));
  }
  SymbolCodec codec;
  if (n == 1) {
    codec.push = [](ShapedMessage&, LaneSpan lanes, const Symbols& values) {
      if (values.size() != lanes.count) {
        throw AnsError("uniform codec: value count does not match lanes");
      }
      for (uint32_t v : values) {
        if (v != 0) throw AnsError("uniform codec: symbol out of range");
      }
    };
    codec.pop = [](ShapedMessage&, LaneSpan lanes) {
      return Symbols(lanes.count, 0);
    };
    return codec;
  }

  const bool pow2 = std::has_single_bit(n);
  const unsigned precision =
      pow2 ? static_cast<unsigned>(std::countr_zero(n)) : kMaxPrecision;
  const uint32_t base = pow2 ? 1 : (1u << kMaxPrecision) / n;
  const uint32_t wide = pow2 ? 0 : (1u << kMaxPrecision) % n;
  auto code_of = [=](uint32_t s) -> LaneCode {
    if (pow2) return {s, 1};
    return {s * base + std::min(s, wide), base + (s < wide ? 1u : 0u)};
  };
  auto symbol_of = [=](uint32_t slot) -> uint32_t {
    if (pow2) return slot;
    const uint32_t split = wide * (base + 1);
    return slot < split ? slot / (base + 1) : wide + (slot - split) / base;
  };

  codec.push = [=](ShapedMessage& msg, LaneSpan lanes, const Symbols& values) {
    if (values.size() != lanes.count) {
      throw AnsError("uniform codec: value count does not match lanes");
    }
    std::vector<LaneCode> codes(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      if (values[i] >= n) throw AnsError("uniform codec: symbol out of range");
      codes[i] = code_of(values[i]);
    }
    PushLanes(msg, lanes, codes, precision);
  };
  codec.pop = [=](ShapedMessage& msg, LaneSpan lanes) {
    Symbols values(lanes.count);
    std::vector<uint32_t> slots(lanes.count);
    PeekSlots(msg, lanes, precision, slots);
    std::vector<LaneCode> codes(lanes.count);
    for (size_t i = 0; i < lanes.count; ++i) {
      values[i] = symbol_of(slots[i]);
      codes[i] = code_of(values[i]);
    }
    PopLanes(msg, lanes, codes, precision);
    return values;
  };
  return codec;
}

SymbolCodec CategoricalCodec(std::vector<QuantizedDistribution> dists) {
  if (dists.empty()) throw AnsError("categorical codec needs a distribution");
  auto shared =
      std::make_shared<const std::vector<QuantizedDistribution>>(std::move(dists));
  SymbolCodec codec;
  codec.push = [shared](ShapedMessage& msg, LaneSpan lanes,
                        const Symbols& values) {
    VPushInPlace(msg, lanes, values, *shared);
  };
  codec.pop = [shared](ShapedMessage& msg, LaneSpan lanes) {
    return VPopInPlace(msg, lanes, *shared);
  };
  return codec;
}

QuantizedDistribution DiscretizeCdf(const std::function<double(double)>& cdf,
                                    std::span<const double> edges,
                                    unsigned precision) {
  if (edges.size() < 2) throw AnsError("need at least two bin edges");
  for (size_t k = 1; k < edges.size(); ++k) {
    if (!(edges[k] > edges[k - 1])) {
      throw AnsError("bin edges must be strictly increasing");
    }
  }
  constexpr double kTolerance = 1e-9;
  std::vector<double> at(edges.size());
  for (size_t k = 0; k < edges.size(); ++k) at[k] = cdf(edges[k]);
  if (std::abs(at.front()) > kTolerance || std::abs(at.back() - 1.0) > kTolerance) {
    throw AnsError("cdf does not span [0, 1] over the bin edges");
  }
  std::vector<double> mass(edges.size() - 1);
  for (size_t k = 0; k < mass.size(); ++k) {
    mass[k] = at[k + 1] - at[k];
    if (mass[k] < 0.0) {
      throw AnsError("cdf is not monotone: bin " + std::to_string(k) +
                     " has negative mass");
    }
  }
  return Quantize(mass, precision);
}

SymbolCodec DiscretizedContinuousCodec(std::function<double(double)> cdf,
                                       std::span<const double> edges,
                                       unsigned precision) {
  return CategoricalCodec({DiscretizeCdf(cdf, edges, precision)});
}

std::vector<size_t> ForwardOrder(size_t n) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  return order;
}

Codec<uint32_t> ScalarOf(SymbolCodec codec) {
  Codec<uint32_t> out;
  out.push = [codec](ShapedMessage& msg, LaneSpan lanes, const uint32_t& v) {
    if (lanes.count != 1) throw AnsError("scalar codec needs exactly 1 lane");
    codec.push(msg, lanes, Symbols{v});
  };
  out.pop = [codec](ShapedMessage& msg, LaneSpan lanes) {
    if (lanes.count != 1) throw AnsError("scalar codec needs exactly 1 lane");
    return codec.pop(msg, lanes)[0];
  };
  return out;
}

}  // namespace hllc
