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

// Bits-back coding with a hierarchical latent model.
//
// Encoding one observation x onto a message shaped (x, z1, ..., zL):
//   i_L <- Q_L(. | x), ..., i_1 <- Q_1(. | i_{2:L}, x)   (pops, top-down)
//   x -> p(. | z(i_{1:L}))                                (push)
//   i_{1:L} -> U(n_bins)                                  (one vector push)
// where Q_l is the posterior mass of the equal-mass bins of the conditional
// prior p(z_l | z_{l+1:L}) and z(i) are the bin centres. Decoding runs the
// exact mirror image.

#ifndef HLLC_BBANS_H_
#define HLLC_BBANS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hllc/model.h"
#include "hllc/random.h"
#include "hllc/vector_ans.h"

namespace hllc {

struct BbansConfig {
  unsigned bins_log2 = 12;
  // Precision of the pixel likelihoods.
  unsigned precision = kDefaultPrecision;

  size_t n_bins() const { return size_t{1} << bins_log2; }
  // Precision of the posterior index distributions: enough headroom that the
  // one-unit floor per bin costs little, capped at the coder maximum.
  unsigned posterior_precision() const;
  void Validate() const;
};

// Leaves (x, z1, ..., zL) for an observation of the given shape.
HeadShape BbansHeadShape(const LatentHierarchyModel& model, Shape3 image);
// Total latent dimension; also the most stream words one encode can pop.
size_t LatentDims(const LatentHierarchyModel& model, Shape3 image);

// Quantized log-masses of one encode, in bits.
struct BbansTrace {
  std::vector<std::vector<uint32_t>> indices;  // per layer, layer 1 first
  double posterior_bits = 0.0;   // sum of -log2 Q(i_l)
  double likelihood_bits = 0.0;  // -log2 p(x | z)
  double prior_bits = 0.0;       // log2 n_bins per latent dimension

  double NetBits() const {
    return prior_bits + likelihood_bits - posterior_bits;
  }
};

// `msg` must be shaped by BbansHeadShape(model, x.shape). Throws
// InsufficientBitsError, with the message left unusable, if a posterior pop
// runs out of stream words.
void BbansPush(ShapedMessage& msg, const Image& x,
               const LatentHierarchyModel& model, const BbansConfig& config,
               BbansTrace* trace = nullptr);
Image BbansPop(ShapedMessage& msg, Shape3 shape,
               const LatentHierarchyModel& model, const BbansConfig& config);

struct SeedPolicy {
  enum class Mode { kError, kCountedRandomSeed };
  Mode mode = Mode::kCountedRandomSeed;
  size_t seed_words = 0;  // 0: worst-case demand of the first encode
  uint64_t rng_seed = 0;
};

// `count` random words whose last word is nonzero, so they unflatten.
std::vector<uint32_t> RandomSeedWords(size_t count, Rng& rng);

struct ChainResult {
  std::vector<uint32_t> words;  // flattened message, seed included
  std::vector<double> net_bits;  // per image, in push order
  size_t seed_words = 0;
  double total_bits() const { return 32.0 * words.size(); }
  double seed_bits() const { return 32.0 * seed_words; }
};

// Chains same-shaped images onto one message grown from the seed.
ChainResult ChainCompress(std::span<const Image> images,
                          const LatentHierarchyModel& model,
                          const BbansConfig& config, const SeedPolicy& policy);
// Returns the images in push order; `residual` receives the words left once
// every image is decoded (the seed, for an archive made by ChainCompress).
std::vector<Image> ChainDecompress(std::span<const uint32_t> words, Shape3 shape,
                                   size_t count,
                                   const LatentHierarchyModel& model,
                                   const BbansConfig& config,
                                   std::vector<uint32_t>* residual = nullptr);

struct ElboEstimate {
  double bits_per_dim = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo negative ELBO of the continuous model.
ElboEstimate EstimateElbo(const LatentHierarchyModel& model, const Image& x,
                          size_t n_samples, Rng& rng);

}  // namespace hllc

#endif  // HLLC_BBANS_H_
