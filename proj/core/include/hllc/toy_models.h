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

// Fixed-parameter hierarchical models that stand in for a trained network.
//
// ToyHierarchy: L in {1, 2, 3} Gaussian latent layers with two channels each,
// layer l at half the spatial size of the layer below (rounded up). Priors
// are 3x3 zero-padded convolutions of the nearest-upsampled layer above, plus
// a skip term from two layers up; posteriors mix the prior mean with block
// averages of the image. Pixels are discretized logistic around a 3x3
// convolution of the upsampled first layer.
//
// LinearGaussianToy: one latent per 2x2 block and channel, x = a z + b + noise,
// so the marginal and the exact posterior are closed form.

#ifndef HLLC_TOY_MODELS_H_
#define HLLC_TOY_MODELS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hllc/model.h"
#include "hllc/random.h"

namespace hllc {

inline constexpr uint8_t kLinearGaussianModelId = 4;

class ToyHierarchy : public LatentHierarchyModel {
 public:
  static constexpr size_t kChannels = 2;
  static constexpr size_t kMaxImageChannels = 4;

  struct LayerParams {
    double prior_w[kChannels][kChannels][9];
    double prior_b[kChannels];
    double log_scale[kChannels];
    double scale_w[kChannels][kChannels];
    double skip[kChannels];
    double post_gain;
    double post_a[kChannels];
    double post_rho[kChannels];
  };
  struct LikelihoodParams {
    double w[kMaxImageChannels][kChannels][9];
    double bias[kMaxImageChannels];
    double log_scale[kMaxImageChannels];
  };
  struct Params {
    LayerParams layers[3];
    LikelihoodParams lik;
  };

  // Nonzero `seed` perturbs every parameter by up to 5% of its magnitude.
  explicit ToyHierarchy(size_t depth, uint64_t seed = 0);

  std::string name() const override;
  uint8_t id() const override { return static_cast<uint8_t>(depth_); }
  size_t depth() const override { return depth_; }
  uint32_t digest() const override;

  Shape3 LatentShape(size_t layer, Shape3 image) const override;
  ConditionalParams Prior(size_t layer, const LatentView& above,
                          Shape3 image) const override;
  ConditionalParams Posterior(size_t layer, const LatentView& above,
                              const Image& x) const override;
  PixelParams Likelihood(const LatentView& all, Shape3 image) const override;

  const Params& params() const { return params_; }

 private:
  size_t depth_;
  Params params_;
};

class LinearGaussianToy : public LatentHierarchyModel {
 public:
  LinearGaussianToy(double a = 40.0, double b = 127.5, double s = 4.0);

  std::string name() const override { return "linear-gaussian"; }
  uint8_t id() const override { return kLinearGaussianModelId; }
  size_t depth() const override { return 1; }
  uint32_t digest() const override;

  Shape3 LatentShape(size_t layer, Shape3 image) const override;
  ConditionalParams Prior(size_t layer, const LatentView& above,
                          Shape3 image) const override;
  // The exact posterior.
  ConditionalParams Posterior(size_t layer, const LatentView& above,
                              const Image& x) const override;
  // Discretized Gaussian pixels for coding.
  PixelParams Likelihood(const LatentView& all, Shape3 image) const override;
  // Gaussian density, matching the closed-form marginal.
  double LogLikelihood(const Image& x, const LatentView& all) const override;

  // -log2 p(x) per dimension under the continuous model.
  double ExactLogMarginalBits(const Image& x) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double s() const { return s_; }

 private:
  double a_;
  double b_;
  double s_;
};

// "toy1", "toy2", "toy3" or "linear-gaussian".
std::unique_ptr<LatentHierarchyModel> BuildToyModel(std::string_view name,
                                                    uint64_t seed = 0);
// Container model ids: 1..3 for toyN, 4 for linear-gaussian.
std::unique_ptr<LatentHierarchyModel> ModelById(uint8_t id);
std::vector<std::string> ModelNames();

// Ancestral sample with continuous latents.
Image SampleImage(const LatentHierarchyModel& model, Shape3 shape, Rng& rng);

// CRC32 of doubles serialized as little-endian IEEE-754.
uint32_t DigestDoubles(std::span<const double> values);

}  // namespace hllc

#endif  // HLLC_TOY_MODELS_H_
