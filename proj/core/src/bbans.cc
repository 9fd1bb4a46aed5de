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

#include "hllc/bbans.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hllc/discretization.h"
#include "hllc/distributions.h"

namespace hllc {
namespace {

// Vector pop where lane i's distribution is only built when its slot is
// known; keeps memory at one distribution regardless of lane count.
template <typename DistFn>
std::vector<uint32_t> PopLazy(ShapedMessage& msg, LaneSpan lanes,
                              unsigned precision, DistFn&& dist_for,
                              double* bits) {
  std::vector<uint32_t> slots(lanes.count);
  PeekSlots(msg, lanes, precision, slots);
  std::vector<LaneCode> codes(lanes.count);
  std::vector<uint32_t> symbols(lanes.count);
  for (size_t i = 0; i < lanes.count; ++i) {
    const QuantizedDistribution d = dist_for(i);
    const uint32_t s = d.SymbolForSlot(slots[i]);
    symbols[i] = s;
    codes[i] = {d.cumulative(s), d.frequency(s)};
    if (bits) *bits += d.InformationBits(s);
  }
  PopLanes(msg, lanes, codes, precision);
  return symbols;
}

template <typename DistFn>
void PushLazy(ShapedMessage& msg, LaneSpan lanes,
              std::span<const uint32_t> symbols, unsigned precision,
              DistFn&& dist_for, double* bits) {
  std::vector<LaneCode> codes(lanes.count);
  for (size_t i = 0; i < lanes.count; ++i) {
    const QuantizedDistribution d = dist_for(i);
    if (symbols[i] >= d.size()) throw AnsError("symbol outside alphabet");
    codes[i] = {d.cumulative(symbols[i]), d.frequency(symbols[i])};
    if (bits) *bits += d.InformationBits(symbols[i]);
  }
  PushLanes(msg, lanes, codes, precision);
}

void CheckParams(const ConditionalParams& p, size_t dims, size_t layer) {
  if (p.loc.size() != dims || p.scale.size() != dims) {
    throw AnsError("layer " + std::to_string(layer) +
                   " conditional has the wrong number of dimensions");
  }
}

struct Layout {
  size_t x_lanes;
  std::vector<LaneSpan> layers;  // layer l at [l - 1]
  LaneSpan all_latents;
};

Layout LayoutOf(const LatentHierarchyModel& model, Shape3 image,
                const ShapedMessage& msg) {
  const HeadShape expected = BbansHeadShape(model, image);
  if (msg.lane_count() != expected.lane_count()) {
    throw AnsError("message head has " + std::to_string(msg.lane_count()) +
                   " lanes; this observation needs " +
                   std::to_string(expected.lane_count()));
  }
  Layout layout;
  layout.x_lanes = image.size();
  for (size_t l = 1; l <= model.depth(); ++l) {
    layout.layers.push_back(
        {expected.leaf_offset(l), expected.leaf_size(l)});
  }
  layout.all_latents = {layout.x_lanes,
                        expected.lane_count() - layout.x_lanes};
  return layout;
}

Tensor3 Centers(const ConditionalParams& prior, std::span<const uint32_t> idx,
                Shape3 shape, size_t n_bins) {
  Tensor3 z(shape);
  const DiscretizationGrid& grid = StandardGrid(prior.family, n_bins);
  for (size_t d = 0; d < idx.size(); ++d) {
    z.data[d] = prior.loc[d] + prior.scale[d] * grid.centers[idx[d]];
  }
  return z;
}

QuantizedDistribution IndexDistribution(const ConditionalParams& prior,
                                        const ConditionalParams& post, size_t d,
                                        const BbansConfig& config) {
  return PosteriorIndexDistribution(
      {prior.family, prior.loc[d], prior.scale[d]},
      {post.family, post.loc[d], post.scale[d]}, config.n_bins(),
      config.posterior_precision());
}

void CheckPixels(const PixelParams& p, size_t n) {
  if (p.loc.size() != n || p.scale.size() != n) {
    throw AnsError("likelihood has the wrong number of pixels");
  }
}

}  // namespace

unsigned BbansConfig::posterior_precision() const {
  return std::min<unsigned>(kMaxPrecision,
                            std::max<unsigned>(precision, bins_log2 + 12));
}

void BbansConfig::Validate() const {
  if (bins_log2 < 1 || bins_log2 > 16) {
    throw AnsError("bins_log2 must be in [1, 16]");
  }
  if (precision < 8 || precision > kMaxPrecision) {
    throw AnsError("likelihood precision must be in [8, 24] for 256 levels");
  }
}

HeadShape BbansHeadShape(const LatentHierarchyModel& model, Shape3 image) {
  std::vector<std::vector<size_t>> leaves;
  leaves.push_back({image.h, image.w, image.c});
  for (size_t l = 1; l <= model.depth(); ++l) {
    const Shape3 s = model.LatentShape(l, image);
    leaves.push_back({s.h, s.w, s.c});
  }
  return HeadShape(std::move(leaves));
}

size_t LatentDims(const LatentHierarchyModel& model, Shape3 image) {
  size_t n = 0;
  for (size_t l = 1; l <= model.depth(); ++l) {
    n += model.LatentShape(l, image).size();
  }
  return n;
}

void BbansPush(ShapedMessage& msg, const Image& x,
               const LatentHierarchyModel& model, const BbansConfig& config,
               BbansTrace* trace) {
  config.Validate();
  const Layout layout = LayoutOf(model, x.shape, msg);
  const size_t depth = model.depth();
  const size_t n_bins = config.n_bins();
  std::vector<Tensor3> z(depth);
  std::vector<std::vector<uint32_t>> idx(depth);
  double posterior_bits = 0.0;

  for (size_t l = depth; l >= 1; --l) {
    const LatentView above(z, l);
    const Shape3 shape = model.LatentShape(l, x.shape);
    const ConditionalParams prior = model.Prior(l, above, x.shape);
    const ConditionalParams post = model.Posterior(l, above, x);
    CheckParams(prior, shape.size(), l);
    CheckParams(post, shape.size(), l);
    idx[l - 1] = PopLazy(
        msg, layout.layers[l - 1], config.posterior_precision(),
        [&](size_t d) { return IndexDistribution(prior, post, d, config); },
        trace ? &posterior_bits : nullptr);
    z[l - 1] = Centers(prior, idx[l - 1], shape, n_bins);
  }

  const PixelParams lik = model.Likelihood(LatentView(z, 0), x.shape);
  CheckPixels(lik, x.data.size());
  std::vector<uint32_t> pixels(x.data.begin(), x.data.end());
  double likelihood_bits = 0.0;
  PushLazy(
      msg, {0, layout.x_lanes}, pixels, config.precision,
      [&](size_t p) {
        return PixelDistribution(lik.family, lik.loc[p], lik.scale[p],
                                 config.precision);
      },
      trace ? &likelihood_bits : nullptr);

  std::vector<LaneCode> uniform;
  uniform.reserve(layout.all_latents.count);
  for (const auto& layer : idx) {
    for (uint32_t i : layer) uniform.push_back({i, 1});
  }
  PushLanes(msg, layout.all_latents, uniform, config.bins_log2);

  if (trace) {
    trace->indices = std::move(idx);
    trace->posterior_bits = posterior_bits;
    trace->likelihood_bits = likelihood_bits;
    trace->prior_bits =
        static_cast<double>(config.bins_log2) * layout.all_latents.count;
  }
}

Image BbansPop(ShapedMessage& msg, Shape3 shape,
               const LatentHierarchyModel& model, const BbansConfig& config) {
  config.Validate();
  const Layout layout = LayoutOf(model, shape, msg);
  const size_t depth = model.depth();
  const size_t n_bins = config.n_bins();

  std::vector<uint32_t> slots(layout.all_latents.count);
  PeekSlots(msg, layout.all_latents, config.bins_log2, slots);
  std::vector<LaneCode> uniform(slots.size());
  for (size_t k = 0; k < slots.size(); ++k) uniform[k] = {slots[k], 1};
  PopLanes(msg, layout.all_latents, uniform, config.bins_log2);

  std::vector<std::vector<uint32_t>> idx(depth);
  size_t offset = 0;
  for (size_t l = 1; l <= depth; ++l) {
    const size_t n = layout.layers[l - 1].count;
    idx[l - 1].assign(slots.begin() + offset, slots.begin() + offset + n);
    offset += n;
  }

  std::vector<Tensor3> z(depth);
  std::vector<ConditionalParams> priors(depth);
  for (size_t l = depth; l >= 1; --l) {
    const Shape3 lshape = model.LatentShape(l, shape);
    priors[l - 1] = model.Prior(l, LatentView(z, l), shape);
    CheckParams(priors[l - 1], lshape.size(), l);
    z[l - 1] = Centers(priors[l - 1], idx[l - 1], lshape, n_bins);
  }

  const PixelParams lik = model.Likelihood(LatentView(z, 0), shape);
  CheckPixels(lik, shape.size());
  const std::vector<uint32_t> pixels = PopLazy(
      msg, {0, layout.x_lanes}, config.precision,
      [&](size_t p) {
        return PixelDistribution(lik.family, lik.loc[p], lik.scale[p],
                                 config.precision);
      },
      nullptr);
  Image x(shape);
  std::copy(pixels.begin(), pixels.end(), x.data.begin());

  for (size_t l = 1; l <= depth; ++l) {
    const ConditionalParams post = model.Posterior(l, LatentView(z, l), x);
    CheckParams(post, idx[l - 1].size(), l);
    const ConditionalParams& prior = priors[l - 1];
    PushLazy(
        msg, layout.layers[l - 1], idx[l - 1], config.posterior_precision(),
        [&](size_t d) { return IndexDistribution(prior, post, d, config); },
        nullptr);
  }
  return x;
}

std::vector<uint32_t> RandomSeedWords(size_t count, Rng& rng) {
  std::vector<uint32_t> words(count);
  for (uint32_t& w : words) w = rng.NextU32();
  if (!words.empty() && words.back() == 0) words.back() = 1;
  return words;
}

ChainResult ChainCompress(std::span<const Image> images,
                          const LatentHierarchyModel& model,
                          const BbansConfig& config, const SeedPolicy& policy) {
  ChainResult result;
  if (images.empty()) return result;
  const Shape3 shape = images[0].shape;
  const HeadShape head = BbansHeadShape(model, shape);
  const size_t demand = 2 + WorstCaseGrowWords(1, head.lane_count()) +
                        LatentDims(model, shape);
  ShapedMessage msg(head);
  if (policy.mode == SeedPolicy::Mode::kCountedRandomSeed) {
    const size_t seed =
        std::max<size_t>(2, policy.seed_words == 0 ? demand : policy.seed_words);
    Rng rng(policy.rng_seed);
    msg = Unflatten(RandomSeedWords(seed, rng), head);
    result.seed_words = seed;
  }
  for (const Image& x : images) {
    if (!(x.shape == shape)) {
      throw AnsError("chained images must share one shape");
    }
    const double before = msg.InformationBits();
    BbansPush(msg, x, model, config);
    result.net_bits.push_back(msg.InformationBits() - before);
  }
  // Seed words below the low-water mark were never read; an automatically
  // sized seed drops them.
  const size_t unread =
      policy.mode == SeedPolicy::Mode::kCountedRandomSeed &&
              policy.seed_words == 0
          ? msg.stream_low_water()
          : 0;
  result.words = Flatten(std::move(msg));
  result.words.erase(result.words.begin(), result.words.begin() + unread);
  result.seed_words -= unread;
  return result;
}

std::vector<Image> ChainDecompress(std::span<const uint32_t> words, Shape3 shape,
                                   size_t count,
                                   const LatentHierarchyModel& model,
                                   const BbansConfig& config,
                                   std::vector<uint32_t>* residual) {
  std::vector<Image> images(count);
  if (count == 0) {
    if (residual) residual->assign(words.begin(), words.end());
    return images;
  }
  ShapedMessage msg = Unflatten(words, BbansHeadShape(model, shape));
  for (size_t k = count; k-- > 0;) {
    images[k] = BbansPop(msg, shape, model, config);
  }
  if (residual) *residual = Flatten(std::move(msg));
  return images;
}

ElboEstimate EstimateElbo(const LatentHierarchyModel& model, const Image& x,
                          size_t n_samples, Rng& rng) {
  if (n_samples == 0) throw AnsError("ELBO needs at least one sample");
  const size_t depth = model.depth();
  const double dims = static_cast<double>(x.shape.size());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (size_t s = 0; s < n_samples; ++s) {
    std::vector<Tensor3> z(depth);
    double log_w = 0.0;
    for (size_t l = depth; l >= 1; --l) {
      const LatentView above(z, l);
      const Shape3 shape = model.LatentShape(l, x.shape);
      const ConditionalParams prior = model.Prior(l, above, x.shape);
      const ConditionalParams post = model.Posterior(l, above, x);
      Tensor3 sample(shape);
      for (size_t d = 0; d < shape.size(); ++d) {
        const double v =
            post.loc[d] + post.scale[d] * StdSample(post.family, rng);
        sample.data[d] = v;
        log_w += LogPdf(prior.family, prior.loc[d], prior.scale[d], v) -
                 LogPdf(post.family, post.loc[d], post.scale[d], v);
      }
      z[l - 1] = std::move(sample);
    }
    log_w += model.LogLikelihood(x, LatentView(z, 0));
    const double bits = -log_w / (dims * std::numbers::ln2);
    sum += bits;
    sum_sq += bits * bits;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1))
                           : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace hllc
