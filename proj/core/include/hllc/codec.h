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

// Composable codecs over a ShapedMessage.
//
// A Codec<T> is a push/pop pair acting on a run of lanes chosen by the
// caller. Primitive codecs move one symbol per lane; combinators build
// larger codecs out of smaller ones. All state lives in the message.

#ifndef HLLC_CODEC_H_
#define HLLC_CODEC_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hllc/ans.h"
#include "hllc/vector_ans.h"

namespace hllc {

using Symbols = std::vector<uint32_t>;

template <typename T>
struct Codec {
  std::function<void(ShapedMessage&, LaneSpan, const T&)> push;
  std::function<T(ShapedMessage&, LaneSpan)> pop;

  ShapedMessage Push(ShapedMessage msg, const T& value) const {
    push(msg, msg.all_lanes(), value);
    return msg;
  }
  std::pair<ShapedMessage, T> Pop(ShapedMessage msg) const {
    T value = pop(msg, msg.all_lanes());
    return {std::move(msg), std::move(value)};
  }
};

using SymbolCodec = Codec<Symbols>;

// Selects lanes of a nested head: a leaf at the root, then slices relative
// to the previous selection.
class ViewLens {
 public:
  static ViewLens Leaf(size_t leaf);
  static ViewLens Slice(size_t begin, size_t count);
  // `this` first, then `inner` relative to it.
  ViewLens Then(const ViewLens& inner) const;

  LaneSpan Resolve(const HeadShape& shape) const;
  LaneSpan Resolve(const HeadShape& shape, LaneSpan parent) const;

  std::vector<uint64_t> Read(const ShapedMessage& msg) const;
  void Write(ShapedMessage& msg, std::span<const uint64_t> lanes) const;

 private:
  struct Step {
    bool leaf;
    size_t a;
    size_t b;
  };
  std::vector<Step> steps_;
};

// Integers in [0, n), one per lane. Powers of two cost exactly log2(n) bits;
// other n use precision 24 with the remainder spread over the lowest symbols,
// which matches Quantize on a flat pmf. n == 1 is free.
SymbolCodec UniformCodec(uint32_t n);

// One distribution broadcast over the lanes, or one per lane.
SymbolCodec CategoricalCodec(std::vector<QuantizedDistribution> dists);

// Bin masses cdf(edge[k+1]) - cdf(edge[k]), quantized. Edges must be strictly
// increasing and cdf must reach 0 and 1 at the outer edges within 1e-9.
// Throws AnsError on a negative mass.
QuantizedDistribution DiscretizeCdf(const std::function<double(double)>& cdf,
                                    std::span<const double> edges,
                                    unsigned precision);
SymbolCodec DiscretizedContinuousCodec(std::function<double(double)> cdf,
                                       std::span<const double> edges,
                                       unsigned precision = kDefaultPrecision);

// Push runs codecs front to back on the same lanes; pop runs back to front.
template <typename T>
Codec<std::vector<T>> SerialCompose(std::vector<Codec<T>> codecs) {
  auto shared = std::make_shared<const std::vector<Codec<T>>>(std::move(codecs));
  Codec<std::vector<T>> out;
  out.push = [shared](ShapedMessage& msg, LaneSpan lanes,
                      const std::vector<T>& values) {
    if (values.size() != shared->size()) {
      throw AnsError("serial compose: value count does not match codecs");
    }
    for (size_t k = 0; k < shared->size(); ++k) {
      (*shared)[k].push(msg, lanes, values[k]);
    }
  };
  out.pop = [shared](ShapedMessage& msg, LaneSpan lanes) {
    std::vector<T> values(shared->size());
    for (size_t k = shared->size(); k-- > 0;) {
      values[k] = (*shared)[k].pop(msg, lanes);
    }
    return values;
  };
  return out;
}

// Applies `inner` to the lanes the lens selects within the caller's lanes.
template <typename T>
Codec<T> ViewCodec(ViewLens lens, Codec<T> inner) {
  Codec<T> out;
  out.push = [lens, inner](ShapedMessage& msg, LaneSpan lanes,
                           const T& value) {
    inner.push(msg, lens.Resolve(msg.shape(), lanes), value);
  };
  out.pop = [lens, inner](ShapedMessage& msg, LaneSpan lanes) {
    return inner.pop(msg, lens.Resolve(msg.shape(), lanes));
  };
  return out;
}

// Sequence codec whose element k is coded under a codec built from a context
// summarizing elements before it (in `order`). `update` folds one element
// into the context and must be deterministic. Push walks the order backwards
// so pop can decode forwards.
template <typename T, typename Context>
Codec<std::vector<T>> AutoregressiveCompose(
    Context initial, std::function<Context(Context, const T&)> update,
    std::function<Codec<T>(const Context&)> step, std::vector<size_t> order) {
  Codec<std::vector<T>> out;
  out.push = [=](ShapedMessage& msg, LaneSpan lanes,
                 const std::vector<T>& values) {
    if (values.size() != order.size()) {
      throw AnsError("autoregressive compose: sequence length mismatch");
    }
    std::vector<Context> contexts;
    contexts.reserve(order.size());
    Context ctx = initial;
    for (size_t k = 0; k < order.size(); ++k) {
      contexts.push_back(ctx);
      ctx = update(std::move(ctx), values[order[k]]);
    }
    for (size_t k = order.size(); k-- > 0;) {
      step(contexts[k]).push(msg, lanes, values[order[k]]);
    }
  };
  out.pop = [=](ShapedMessage& msg, LaneSpan lanes) {
    std::vector<T> values(order.size());
    Context ctx = initial;
    for (size_t k = 0; k < order.size(); ++k) {
      values[order[k]] = step(ctx).pop(msg, lanes);
      ctx = update(std::move(ctx), values[order[k]]);
    }
    return values;
  };
  return out;
}

// Identity traversal 0, 1, ..., n - 1.
std::vector<size_t> ForwardOrder(size_t n);

// Adapts a one-lane symbol codec to scalar values.
Codec<uint32_t> ScalarOf(SymbolCodec codec);

}  // namespace hllc

#endif  // HLLC_CODEC_H_
