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

// Interface of a hierarchical latent-variable model as seen by the coder.
//
// Layers are numbered 1..L from the observation upwards. Both the prior and
// the posterior of layer l are evaluated top-down: they receive a LatentView
// that only exposes layers l+1..L, so a posterior that peeks at lower layers
// cannot be written against this interface.

#ifndef HLLC_MODEL_H_
#define HLLC_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hllc/distributions.h"

namespace hllc {

struct Shape3 {
  size_t h = 1;
  size_t w = 1;
  size_t c = 1;
  size_t size() const { return h * w * c; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

// Dense H x W x C array, channel fastest.
struct Tensor3 {
  Shape3 shape;
  std::vector<double> data;

  Tensor3() = default;
  explicit Tensor3(Shape3 s) : shape(s), data(s.size(), 0.0) {}
  double& at(size_t i, size_t j, size_t k) {
    return data[(i * shape.w + j) * shape.c + k];
  }
  double at(size_t i, size_t j, size_t k) const {
    return data[(i * shape.w + j) * shape.c + k];
  }
  // Zero outside the array.
  double padded(long i, long j, size_t k) const {
    if (i < 0 || j < 0 || i >= static_cast<long>(shape.h) ||
        j >= static_cast<long>(shape.w)) {
      return 0.0;
    }
    return at(static_cast<size_t>(i), static_cast<size_t>(j), k);
  }
};

// 8-bit image, channel fastest.
struct Image {
  Shape3 shape;
  std::vector<uint8_t> data;

  Image() = default;
  explicit Image(Shape3 s) : shape(s), data(s.size(), 0) {}
  uint8_t& at(size_t i, size_t j, size_t k) {
    return data[(i * shape.w + j) * shape.c + k];
  }
  uint8_t at(size_t i, size_t j, size_t k) const {
    return data[(i * shape.w + j) * shape.c + k];
  }
  friend bool operator==(const Image&, const Image&) = default;
};

// Read access to latent layers strictly above `layer` (or to all layers when
// layer == 0). `latents[l - 1]` holds layer l.
class LatentView {
 public:
  LatentView(std::span<const Tensor3> latents, size_t layer)
      : latents_(latents), layer_(layer) {}

  size_t visible_from() const { return layer_ + 1; }
  size_t depth() const { return latents_.size(); }
  // Throws std::out_of_range for a layer at or below the view's own.
  const Tensor3& layer(size_t l) const {
    if (l <= layer_ || l > latents_.size()) {
      throw std::out_of_range("latent layer " + std::to_string(l) +
                              " is not visible from layer " +
                              std::to_string(layer_));
    }
    return latents_[l - 1];
  }

 private:
  std::span<const Tensor3> latents_;
  size_t layer_;
};

// Per-dimension location-scale parameters, in the layer's flat order.
struct ConditionalParams {
  Family family = Family::kGaussian;
  std::vector<double> loc;
  std::vector<double> scale;
};

struct PixelParams {
  Family family = Family::kLogistic;
  std::vector<double> loc;
  std::vector<double> scale;
};

class LatentHierarchyModel {
 public:
  virtual ~LatentHierarchyModel() = default;

  virtual std::string name() const = 0;
  virtual uint8_t id() const = 0;
  virtual size_t depth() const = 0;
  // CRC32 of the serialized parameters.
  virtual uint32_t digest() const = 0;

  virtual Shape3 LatentShape(size_t layer, Shape3 image) const = 0;
  // p(z_l | z_{l+1:L}).
  virtual ConditionalParams Prior(size_t layer, const LatentView& above,
                                  Shape3 image) const = 0;
  // q(z_l | z_{l+1:L}, x).
  virtual ConditionalParams Posterior(size_t layer, const LatentView& above,
                                      const Image& x) const = 0;
  // p(x | z_{1:L}); `all` has visible_from() == 1.
  virtual PixelParams Likelihood(const LatentView& all, Shape3 image) const = 0;
  // log p(x | z) in nats as used by the variational bound. Defaults to the
  // discretized pixel masses.
  virtual double LogLikelihood(const Image& x, const LatentView& all) const;
};

}  // namespace hllc

#endif  // HLLC_MODEL_H_
