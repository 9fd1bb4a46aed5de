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

#include "hllc/toy_models.h"

#include <zlib.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <stdexcept>

#include "hllc/distributions.h"

namespace hllc {
namespace {

// Generated once from a fixed seed and committed; selftest checks digests.
constexpr ToyHierarchy::Params kToyParams[3] = {
    // depth 1
    {{
         {{
             {{0.105, -0.0221, 0.0851, -0.0505, 0.738, 0.0135, 0.0762, -0.0005, 0.0628}, {0.1044, 0.0504, -0.0292, 0.1007, 0.2468, -0.0452, 0.1008, -0.046, 0.0426}},
             {{-0.0166, 0.0802, -0.0426, -0.0488, 0.2088, -0.0799, -0.0724, 0.0148, -0.011}, {0.0614, 0.0635, 0.1067, 0.0749, 0.7016, -0.058, 0.0612, -0.0154, 0.0966}},
          },
          {-0.0799, -0.0851}, {-0.2363, -0.3905},
          {{0.1366, -0.0176}, {-0.0857, 0.1473}},
          {0.2169, -0.1681}, 0.65, {1.0442, 0.5799}, {0.4743, 0.6481}},
         {{
             {{-0.0476, -0.025, 0.0786, 0.0738, 0.7161, -0.0798, 0.079, 0.1129, 0.104}, {-0.0111, 0.0603, -0.0103, 0.1174, -0.1762, -0.0289, 0.0861, -0.0283, 0.0091}},
             {{-0.0235, 0.024, 0.0487, 0.1163, -0.22, 0.1044, 0.1165, 0.1094, -0.0386}, {0.0997, 0.064, 0.1019, -0.0231, 0.742, -0.0426, -0.0221, 0.0717, 0.1052}},
          },
          {-0.0652, 0.0678}, {-0.1851, -0.4031},
          {{0.0809, 0.0257}, {-0.142, -0.1357}},
          {0.1817, -0.1987}, 0.663, {0.9632, 0.5686}, {0.4947, 0.5944}},
         {{
             {{0.0543, -0.0115, 0.1038, 0.0843, 0.6714, 0.0683, 0.0686, 0.0847, 0.0629}, {0.0092, 0.1007, -0.0513, -0.0255, 0.1645, 0.0657, 0.0721, 0.0852, -0.061}},
             {{0.0583, 0.1159, 0.0752, 0.039, 0.1696, 0.0624, 0.1097, 0.0066, -0.059}, {0.0425, -0.0349, -0.0154, -0.0523, 0.655, 0.1093, -0.0613, -0.0518, 0.1146}},
          },
          {-0.0529, 0.0717}, {-0.1672, -0.2751},
          {{-0.1809, -0.2592}, {-0.2554, -0.0978}},
          {0.1643, -0.1873}, 0.6445, {0.934, 0.589}, {0.4931, 0.6207}},
     },
     {{
          {{-0.6451, 2.926, 2.6244, -0.9013, 22.4876, 2.6237, 1.9754, 2.3046, 0.6978}, {-1.3043, -1.8779, 2.5251, 0.858, 8.3178, -0.3291, 1.807, 1.1495, -0.9037}},
          {{2.7747, -1.3547, 2.2343, -0.1566, 24.6631, 2.2561, 1.1574, -1.5747, 1.4104}, {0.4916, -0.7837, 2.7503, 0.1596, 6.0913, -1.4331, -0.8524, 1.5061, 0.5287}},
          {{2.5379, 2.3381, -0.9622, -0.9601, 25.9489, 1.8265, 1.3018, -1.3513, -0.1005}, {1.9764, 0.0532, 2.1295, -1.3685, 3.0072, 1.6746, 0.605, -0.3287, -0.571}},
          {{0.5432, 1.8667, 2.1284, 0.1845, 28.9438, 0.2021, 0.3807, -1.6107, 2.0411}, {2.0904, 0.61, 2.3506, 0.0318, -0.2915, -1.8981, 2.2871, -1.0369, -1.8245}},
      },
      {4.981, 3.8996, -4.5053, 3.4623},
      {1.8721, 1.827, 1.6722, 1.9269}}},
    // depth 2
    {{
         {{
             {{-0.0525, -0.0564, 0.0858, 0.0255, 0.6592, 0.1099, 0.1057, -0.065, 0.0573}, {-0.0224, 0.0313, 0.0786, -0.0049, 0.1934, 0.1048, 0.0632, 0.1108, 0.0877}},
             {{0.0632, 0.108, -0.0017, -0.0495, 0.1717, -0.0086, -0.0046, 0.105, 0.0511}, {-0.075, -0.0637, -0.0442, -0.0493, 0.6837, 0.1157, 0.0242, -0.0301, 0.0707}},
          },
          {0.0232, -0.0837}, {-0.3399, -0.3954},
          {{-0.0462, -0.1491}, {-0.2451, 0.2821}},
          {0.1097, -0.1279}, 0.6876, {0.9524, 0.5995}, {0.4349, 0.6467}},
         {{
             {{0.0051, 0.0986, 0.0793, -0.021, 0.6549, 0.0312, -0.0349, 0.0519, -0.0386}, {0.0217, 0.0438, 0.0495, 0.0783, -0.2106, 0.0148, 0.0247, 0.0506, 0.0188}},
             {{0.1071, 0.0946, 0.0945, -0.0147, -0.1555, 0.0347, 0.0731, 0.0999, 0.0556}, {0.0792, -0.0368, -0.0675, 0.0645, 0.6981, -0.01, -0.0798, 0.0288, 0.0956}},
          },
          {0.0491, 0.0797}, {-0.4304, -0.1828},
          {{0.1764, 0.166}, {-0.1146, -0.0901}},
          {0.2256, -0.1836}, 0.6105, {0.9279, 0.644}, {0.4796, 0.6281}},
         {{
             {{0.0973, 0.0559, 0.0553, 0.0901, 0.7034, 0.1182, -0.008, -0.0479, -0.0296}, {0.0573, 0.0575, -0.0735, 0.1031, 0.1522, 0.092, 0.051, 0.0905, -0.015}},
             {{0.0307, -0.009, -0.0205, 0.1088, 0.2402, 0.0133, -0.0033, 0.0501, 0.0851}, {0.0117, 0.0772, -0.0362, 0.0135, 0.7147, 0.1071, -0.0174, -0.0732, 0.0411}},
          },
          {-0.0434, 0.0015}, {-0.3178, -0.3624},
          {{-0.222, -0.0505}, {-0.0131, -0.1979}},
          {0.1606, -0.1257}, 0.6959, {1.08, 0.6559}, {0.4277, 0.5845}},
     },
     {{
          {{0.2991, -0.6776, 0.7775, -1.3362, 21.4878, -0.5393, 1.4859, -0.643, 2.4922}, {-0.4141, -0.7343, -1.5695, -0.8211, 9.4809, 1.9546, -0.4344, -0.5035, -1.2935}},
          {{0.0344, -1.4781, 1.9964, 0.3281, 23.4536, -1.8783, -1.5459, -0.1758, -0.1031}, {1.3623, 1.463, 0.202, 0.6197, 6.2805, -1.7705, 0.3836, -1.5397, -1.8473}},
          {{-1.8152, 0.4748, 0.489, 0.2145, 25.3998, -0.0477, -1.231, -1.8479, -0.4028}, {0.2586, 2.9826, 1.3015, 2.1472, 3.8298, 2.8311, -1.8668, 1.7257, -0.8267}},
          {{1.2466, -0.2927, -1.2065, 0.3382, 27.3537, 1.4527, 1.9069, 0.5855, -0.2083}, {2.918, 1.877, 0.5926, 1.3646, 0.4302, 0.471, -0.4243, -1.0812, -1.3604}},
      },
      {-2.4437, 3.4679, 1.6051, 0.3198},
      {1.6334, 1.7976, 1.9343, 1.8784}}},
    // depth 3
    {{
         {{
             {{-0.0399, 0.0975, 0.001, 0.0467, 0.6783, 0.0881, 0.0923, 0.0596, -0.0453}, {-0.0732, -0.0792, 0.0708, -0.0113, 0.2185, 0.039, -0.0003, -0.0784, 0.1015}},
             {{0.0709, -0.0412, -0.0525, -0.0393, 0.1534, 0.0125, 0.0737, -0.0694, 0.0531}, {0.0954, -0.0079, 0.0376, 0.0056, 0.7455, 0.0964, 0.0783, -0.036, 0.0682}},
          },
          {-0.0766, -0.0522}, {-0.4165, -0.1905},
          {{0.2425, -0.0365}, {-0.208, 0.2416}},
          {0.1532, -0.1149}, 0.6614, {1.0908, 0.6971}, {0.4375, 0.6202}},
         {{
             {{0.0202, 0.034, 0.0626, -0.0531, 0.6797, 0.0191, 0.0227, 0.0554, -0.012}, {0.0386, 0.0913, -0.0043, -0.0308, -0.2258, 0.1116, -0.0472, 0.0547, -0.0502}},
             {{-0.0752, 0.0694, -0.079, -0.0108, -0.2163, -0.0251, 0.0979, 0.0706, -0.0678}, {0.0041, 0.0262, 0.1151, 0.0229, 0.7256, -0.0037, 0.0124, 0.053, 0.0776}},
          },
          {0.0267, -0.0997}, {-0.3661, -0.2897},
          {{-0.1353, 0.0375}, {-0.1302, -0.0851}},
          {0.1307, -0.1393}, 0.667, {0.9009, 0.5286}, {0.4617, 0.5704}},
         {{
             {{-0.07, -0.0618, 0.0765, -0.0652, 0.715, -0.0715, -0.049, -0.0672, 0.0949}, {0.023, -0.0184, 0.0835, 0.056, 0.1983, 0.0855, 0.0685, 0.0282, 0.0537}},
             {{0.1168, -0.0564, -0.0185, 0.0116, 0.2292, -0.0419, -0.0393, 0.0559, -0.0166}, {0.0131, 0.0637, 0.0747, 0.0412, 0.6608, -0.0532, -0.071, 0.0185, 0.0194}},
          },
          {-0.0778, -0.0772}, {-0.245, -0.1854},
          {{-0.0515, -0.0269}, {0.2547, 0.1052}},
          {0.1931, -0.1909}, 0.6014, {1.0208, 0.6778}, {0.4554, 0.6136}},
     },
     {{
          {{-1.9142, 0.8546, 2.4897, -1.7682, 21.7802, -1.2232, 2.0249, 0.1958, 2.4789}, {-0.2896, 0.9648, -0.419, -0.0487, 9.3588, -0.2658, 2.8637, -0.8126, -0.955}},
          {{1.6933, 2.3031, 1.9158, 2.6706, 23.816, 1.154, -0.5566, 0.8586, 1.7167}, {1.8689, 1.5242, 2.9728, 1.2605, 5.726, 0.031, -1.2513, 0.9332, -0.9853}},
          {{-1.2132, 0.5384, 1.204, 0.7111, 26.572, -0.1878, -0.4622, -0.7316, 0.1864}, {0.9672, 0.1485, 1.4789, 0.3086, 3.276, 0.7362, -1.3897, -1.5375, 0.8924}},
          {{-0.4996, -1.4824, -1.1144, 2.8066, 27.428, 0.7878, 2.7162, 2.2081, 1.6665}, {-0.0425, 2.5927, 1.8031, 0.0704, 0.5926, 2.0552, 0.4109, -0.805, -1.9613}},
      },
      {-3.8703, 1.7952, -3.6474, -2.453},
      {1.8446, 1.6577, 1.7804, 1.6976}}},
};

constexpr size_t kParamCount = sizeof(ToyHierarchy::Params) / sizeof(double);
static_assert(sizeof(ToyHierarchy::Params) % sizeof(double) == 0);

size_t HalfUp(size_t n) { return (n + 1) / 2; }

constexpr int kTapY[9] = {-1, -1, -1, 0, 0, 0, 1, 1, 1};
constexpr int kTapX[9] = {-1, 0, 1, -1, 0, 1, -1, 0, 1};

void CheckLayer(size_t layer, size_t depth) {
  if (layer < 1 || layer > depth) {
    throw std::out_of_range("layer " + std::to_string(layer) +
                            " outside [1, " + std::to_string(depth) + "]");
  }
}

}  // namespace

uint32_t DigestDoubles(std::span<const double> values) {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (double v : values) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    unsigned char bytes[8];
    for (int k = 0; k < 8; ++k) bytes[k] = static_cast<unsigned char>(bits >> (8 * k));
    crc = crc32(crc, bytes, 8);
  }
  return static_cast<uint32_t>(crc);
}

double LatentHierarchyModel::LogLikelihood(const Image& x,
                                           const LatentView& all) const {
  const PixelParams lik = Likelihood(all, x.shape);
  double total = 0.0;
  for (size_t p = 0; p < x.data.size(); ++p) {
    total += PixelLogProb(lik.family, lik.loc[p], lik.scale[p], x.data[p]);
  }
  return total;
}

ToyHierarchy::ToyHierarchy(size_t depth, uint64_t seed) : depth_(depth) {
  if (depth < 1 || depth > 3) {
    throw std::invalid_argument("toy hierarchy depth must be 1, 2 or 3");
  }
  params_ = kToyParams[depth - 1];
  if (seed != 0) {
    std::array<double, kParamCount> flat;
    std::memcpy(flat.data(), &params_, sizeof(params_));
    std::mt19937_64 engine(seed);
    for (double& p : flat) {
      const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
      p *= 1.0 + 0.05 * (2.0 * u - 1.0);
    }
    std::memcpy(&params_, flat.data(), sizeof(params_));
  }
}

std::string ToyHierarchy::name() const {
  return "toy" + std::to_string(depth_);
}

uint32_t ToyHierarchy::digest() const {
  std::array<double, kParamCount> flat;
  std::memcpy(flat.data(), &params_, sizeof(params_));
  return DigestDoubles(flat);
}

Shape3 ToyHierarchy::LatentShape(size_t layer, Shape3 image) const {
  CheckLayer(layer, depth_);
  Shape3 s = image;
  for (size_t l = 0; l < layer; ++l) {
    s.h = HalfUp(s.h);
    s.w = HalfUp(s.w);
  }
  s.c = kChannels;
  return s;
}

ConditionalParams ToyHierarchy::Prior(size_t layer, const LatentView& above,
                                      Shape3 image) const {
  const Shape3 shape = LatentShape(layer, image);
  ConditionalParams out;
  out.family = Family::kGaussian;
  out.loc.assign(shape.size(), 0.0);
  out.scale.assign(shape.size(), 1.0);
  if (layer == depth_) return out;

  const LayerParams& p = params_.layers[layer - 1];
  const Tensor3& up = above.layer(layer + 1);
  const Tensor3* skip = layer + 2 <= depth_ ? &above.layer(layer + 2) : nullptr;
  const long h = static_cast<long>(shape.h);
  const long w = static_cast<long>(shape.w);
  size_t d = 0;
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) {
      for (size_t k = 0; k < kChannels; ++k, ++d) {
        double mu = p.prior_b[k];
        double gate = 0.0;
        for (size_t c = 0; c < kChannels; ++c) {
          for (int t = 0; t < 9; ++t) {
            const long ii = i + kTapY[t];
            const long jj = j + kTapX[t];
            if (ii < 0 || jj < 0 || ii >= h || jj >= w) continue;
            mu += p.prior_w[k][c][t] * up.at(ii >> 1, jj >> 1, c);
          }
          gate += p.scale_w[k][c] * up.at(i >> 1, j >> 1, c);
        }
        if (skip) mu += p.skip[k] * skip->at(i >> 2, j >> 2, k);
        out.loc[d] = mu;
        out.scale[d] = std::exp(p.log_scale[k] + 0.2 * std::tanh(gate));
      }
    }
  }
  return out;
}

ConditionalParams ToyHierarchy::Posterior(size_t layer, const LatentView& above,
                                          const Image& x) const {
  ConditionalParams out = Prior(layer, above, x.shape);
  const Shape3 shape = LatentShape(layer, x.shape);
  const LayerParams& p = params_.layers[layer - 1];
  // Mean of (x - 127.5) / 24 over each 2^layer block and all channels.
  std::vector<double> sum(shape.h * shape.w, 0.0);
  std::vector<double> count(shape.h * shape.w, 0.0);
  for (size_t i = 0; i < x.shape.h; ++i) {
    for (size_t j = 0; j < x.shape.w; ++j) {
      const size_t b = (i >> layer) * shape.w + (j >> layer);
      for (size_t c = 0; c < x.shape.c; ++c) {
        sum[b] += (x.at(i, j, c) - 127.5) / 24.0;
        count[b] += 1.0;
      }
    }
  }
  for (size_t b = 0; b < sum.size(); ++b) {
    const double f = sum[b] / count[b];
    for (size_t k = 0; k < kChannels; ++k) {
      const size_t d = b * kChannels + k;
      out.loc[d] =
          (1.0 - p.post_gain) * out.loc[d] + p.post_gain * p.post_a[k] * f;
      out.scale[d] *= p.post_rho[k];
    }
  }
  return out;
}

PixelParams ToyHierarchy::Likelihood(const LatentView& all,
                                     Shape3 image) const {
  if (image.c < 1 || image.c > kMaxImageChannels) {
    throw std::invalid_argument("toy models support 1 to 4 channels");
  }
  const Tensor3& z1 = all.layer(1);
  const LikelihoodParams& p = params_.lik;
  PixelParams out;
  out.family = Family::kLogistic;
  out.loc.resize(image.size());
  out.scale.resize(image.size());
  const long h = static_cast<long>(image.h);
  const long w = static_cast<long>(image.w);
  size_t d = 0;
  for (long i = 0; i < h; ++i) {
    for (long j = 0; j < w; ++j) {
      for (size_t c = 0; c < image.c; ++c, ++d) {
        double mu = 127.5 + p.bias[c];
        for (size_t k = 0; k < kChannels; ++k) {
          for (int t = 0; t < 9; ++t) {
            const long ii = i + kTapY[t];
            const long jj = j + kTapX[t];
            if (ii < 0 || jj < 0 || ii >= h || jj >= w) continue;
            mu += p.w[c][k][t] * z1.at(ii >> 1, jj >> 1, k);
          }
        }
        out.loc[d] = mu;
        out.scale[d] = std::exp(p.log_scale[c]);
      }
    }
  }
  return out;
}

LinearGaussianToy::LinearGaussianToy(double a, double b, double s)
    : a_(a), b_(b), s_(s) {
  if (!(s > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("linear-gaussian toy needs s > 0");
  }
}

uint32_t LinearGaussianToy::digest() const {
  const double values[3] = {a_, b_, s_};
  return DigestDoubles(values);
}

Shape3 LinearGaussianToy::LatentShape(size_t layer, Shape3 image) const {
  CheckLayer(layer, 1);
  return {HalfUp(image.h), HalfUp(image.w), image.c};
}

ConditionalParams LinearGaussianToy::Prior(size_t layer, const LatentView&,
                                           Shape3 image) const {
  const size_t n = LatentShape(layer, image).size();
  return {Family::kGaussian, std::vector<double>(n, 0.0),
          std::vector<double>(n, 1.0)};
}

ConditionalParams LinearGaussianToy::Posterior(size_t layer, const LatentView&,
                                               const Image& x) const {
  const Shape3 shape = LatentShape(layer, x.shape);
  std::vector<double> residual(shape.size(), 0.0);
  std::vector<double> count(shape.size(), 0.0);
  for (size_t i = 0; i < x.shape.h; ++i) {
    for (size_t j = 0; j < x.shape.w; ++j) {
      for (size_t c = 0; c < x.shape.c; ++c) {
        const size_t d = ((i >> 1) * shape.w + (j >> 1)) * shape.c + c;
        residual[d] += x.at(i, j, c) - b_;
        count[d] += 1.0;
      }
    }
  }
  ConditionalParams out;
  out.family = Family::kGaussian;
  out.loc.resize(shape.size());
  out.scale.resize(shape.size());
  const double s2 = s_ * s_;
  for (size_t d = 0; d < shape.size(); ++d) {
    const double precision = 1.0 + count[d] * a_ * a_ / s2;
    out.loc[d] = (a_ / s2) * residual[d] / precision;
    out.scale[d] = 1.0 / std::sqrt(precision);
  }
  return out;
}

PixelParams LinearGaussianToy::Likelihood(const LatentView& all,
                                          Shape3 image) const {
  const Tensor3& z = all.layer(1);
  PixelParams out;
  out.family = Family::kGaussian;
  out.loc.resize(image.size());
  out.scale.assign(image.size(), s_);
  size_t d = 0;
  for (size_t i = 0; i < image.h; ++i) {
    for (size_t j = 0; j < image.w; ++j) {
      for (size_t c = 0; c < image.c; ++c, ++d) {
        out.loc[d] = a_ * z.at(i >> 1, j >> 1, c) + b_;
      }
    }
  }
  return out;
}

double LinearGaussianToy::LogLikelihood(const Image& x,
                                        const LatentView& all) const {
  const PixelParams lik = Likelihood(all, x.shape);
  double total = 0.0;
  for (size_t p = 0; p < x.data.size(); ++p) {
    total += LogPdf(Family::kGaussian, lik.loc[p], s_, x.data[p]);
  }
  return total;
}

double LinearGaussianToy::ExactLogMarginalBits(const Image& x) const {
  // Each block of n pixels sharing a latent is N(b, s^2 I + a^2 1 1^T).
  const Shape3 shape = LatentShape(1, x.shape);
  std::vector<double> sum(shape.size(), 0.0);
  std::vector<double> sum_sq(shape.size(), 0.0);
  std::vector<double> count(shape.size(), 0.0);
  for (size_t i = 0; i < x.shape.h; ++i) {
    for (size_t j = 0; j < x.shape.w; ++j) {
      for (size_t c = 0; c < x.shape.c; ++c) {
        const size_t d = ((i >> 1) * shape.w + (j >> 1)) * shape.c + c;
        const double r = x.at(i, j, c) - b_;
        sum[d] += r;
        sum_sq[d] += r * r;
        count[d] += 1.0;
      }
    }
  }
  const double s2 = s_ * s_;
  const double a2 = a_ * a_;
  double log_p = 0.0;
  for (size_t d = 0; d < shape.size(); ++d) {
    const double n = count[d];
    const double log_det = n * std::log(s2) + std::log1p(n * a2 / s2);
    const double quad = (sum_sq[d] - a2 / (s2 + n * a2) * sum[d] * sum[d]) / s2;
    log_p -= 0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + quad);
  }
  return -log_p / (std::numbers::ln2 * static_cast<double>(x.shape.size()));
}

std::unique_ptr<LatentHierarchyModel> BuildToyModel(std::string_view name,
                                                    uint64_t seed) {
  if (name == "toy1") return std::make_unique<ToyHierarchy>(1, seed);
  if (name == "toy2") return std::make_unique<ToyHierarchy>(2, seed);
  if (name == "toy3") return std::make_unique<ToyHierarchy>(3, seed);
  if (name == "linear-gaussian") return std::make_unique<LinearGaussianToy>();
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::unique_ptr<LatentHierarchyModel> ModelById(uint8_t id) {
  if (id >= 1 && id <= 3) return std::make_unique<ToyHierarchy>(id);
  if (id == kLinearGaussianModelId) return std::make_unique<LinearGaussianToy>();
  throw std::invalid_argument("unknown model id " + std::to_string(id));
}

std::vector<std::string> ModelNames() {
  return {"toy1", "toy2", "toy3", "linear-gaussian"};
}

Image SampleImage(const LatentHierarchyModel& model, Shape3 shape, Rng& rng) {
  const size_t depth = model.depth();
  std::vector<Tensor3> z(depth);
  for (size_t l = depth; l >= 1; --l) {
    const ConditionalParams prior = model.Prior(l, LatentView(z, l), shape);
    Tensor3 t(model.LatentShape(l, shape));
    for (size_t d = 0; d < t.data.size(); ++d) {
      t.data[d] = prior.loc[d] + prior.scale[d] * StdSample(prior.family, rng);
    }
    z[l - 1] = std::move(t);
  }
  const PixelParams lik = model.Likelihood(LatentView(z, 0), shape);
  Image x(shape);
  for (size_t p = 0; p < x.data.size(); ++p) {
    x.data[p] = static_cast<uint8_t>(
        SamplePixel(lik.family, lik.loc[p], lik.scale[p], rng));
  }
  return x;
}

}  // namespace hllc
