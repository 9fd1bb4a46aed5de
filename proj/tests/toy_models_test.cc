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

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hllc/bbans.h"
#include "hllc/selftest.h"
#include "test_support.h"

namespace hllc {
namespace {

// Bitwise reflected CRC-32 (polynomial 0xEDB88320).
uint32_t ReferenceCrc(const std::vector<uint8_t>& bytes) {
  uint32_t crc = 0xFFFFFFFFu;
  for (uint8_t b : bytes) {
    crc ^= b;
    for (int k = 0; k < 8; ++k) {
      crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
    }
  }
  return ~crc;
}

TEST(DigestTest, MatchesBitwiseCrcOfLittleEndianDoubles) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(rng.Below(40));
    for (double& d : v) d = rng.Normal() * std::ldexp(1.0, static_cast<int>(rng.Below(40)) - 20);
    std::vector<uint8_t> bytes;
    for (double d : v) {
      uint64_t bits;
      std::memcpy(&bits, &d, 8);
      for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<uint8_t>(bits >> (8 * k)));
    }
    EXPECT_EQ(DigestDoubles(v), ReferenceCrc(bytes));
  }
  EXPECT_EQ(ReferenceCrc({'1', '2', '3', '4', '5', '6', '7', '8', '9'}),
            0xCBF43926u);
}

TEST(DigestTest, ShippedModelsMatchPublishedDigests) {
  const auto& expected = ExpectedModelDigests();
  for (const std::string& name : ModelNames()) {
    const auto a = BuildToyModel(name);
    const auto b = BuildToyModel(name);
    EXPECT_EQ(a->digest(), b->digest()) << name;
    ASSERT_TRUE(expected.count(name)) << name;
    EXPECT_EQ(a->digest(), expected.at(name)) << name;
    EXPECT_EQ(a->name(), name);
    EXPECT_EQ(ModelById(a->id())->digest(), a->digest());
  }
}

TEST(DigestTest, PerturbedParametersChangeTheDigest) {
  for (size_t depth = 1; depth <= 3; ++depth) {
    ToyHierarchy base(depth);
    ToyHierarchy seeded(depth, 42);
    ToyHierarchy again(depth, 42);
    EXPECT_NE(base.digest(), seeded.digest());
    EXPECT_EQ(seeded.digest(), again.digest());
  }
  EXPECT_NE(LinearGaussianToy().digest(), LinearGaussianToy(41.0).digest());
}

TEST(ModelRegistryTest, NamesAndIds) {
  EXPECT_EQ(ModelNames(), (std::vector<std::string>{"toy1", "toy2", "toy3",
                                                    "linear-gaussian"}));
  for (uint8_t id = 1; id <= 4; ++id) EXPECT_EQ(ModelById(id)->id(), id);
  EXPECT_EQ(ModelById(4)->name(), "linear-gaussian");
  EXPECT_THROW(ModelById(0), std::invalid_argument);
  EXPECT_THROW(ModelById(5), std::invalid_argument);
  EXPECT_THROW(BuildToyModel("toy4"), std::invalid_argument);
  EXPECT_EQ(BuildToyModel("toy3")->depth(), 3u);
}

TEST(ToyHierarchyTest, LatentShapesHalveRoundingUp) {
  ToyHierarchy model(3);
  const Shape3 img{13, 17, 3};
  EXPECT_EQ(model.LatentShape(1, img), (Shape3{7, 9, 2}));
  EXPECT_EQ(model.LatentShape(2, img), (Shape3{4, 5, 2}));
  EXPECT_EQ(model.LatentShape(3, img), (Shape3{2, 3, 2}));
  EXPECT_EQ(model.LatentShape(3, Shape3{1, 1, 1}), (Shape3{1, 1, 2}));
  EXPECT_ANY_THROW(model.LatentShape(0, img));
  EXPECT_ANY_THROW(model.LatentShape(4, img));
  LinearGaussianToy lg;
  EXPECT_EQ(lg.LatentShape(1, img), (Shape3{7, 9, 3}));
}

// Parameters are convolutional, so one model evaluates any image size.
TEST(ToyHierarchyTest, EvaluatesOnUnseenShapes) {
  Rng rng(3);
  for (const std::string& name : ModelNames()) {
    const auto model = BuildToyModel(name);
    for (Shape3 shape : {Shape3{8, 8, 1}, Shape3{13, 17, 3}, Shape3{1, 30, 4}}) {
      const Image x = SampleImage(*model, shape, rng);
      ASSERT_EQ(x.shape, shape);
      std::vector<Tensor3> z(model->depth());
      for (size_t l = model->depth(); l >= 1; --l) {
        const Shape3 ls = model->LatentShape(l, shape);
        const ConditionalParams prior =
            model->Prior(l, LatentView(z, l), shape);
        const ConditionalParams post = model->Posterior(l, LatentView(z, l), x);
        ASSERT_EQ(prior.loc.size(), ls.size());
        ASSERT_EQ(post.scale.size(), ls.size());
        for (size_t d = 0; d < ls.size(); ++d) {
          EXPECT_TRUE(std::isfinite(prior.loc[d]) && std::isfinite(post.loc[d]));
          EXPECT_GT(prior.scale[d], 0.0);
          EXPECT_GT(post.scale[d], 0.0);
        }
        z[l - 1] = Tensor3(ls);
        for (size_t d = 0; d < ls.size(); ++d) z[l - 1].data[d] = post.loc[d];
      }
      const PixelParams lik = model->Likelihood(LatentView(z, 0), shape);
      ASSERT_EQ(lik.loc.size(), shape.size());
      for (double s : lik.scale) EXPECT_GT(s, 0.0);
      EXPECT_TRUE(std::isfinite(model->LogLikelihood(x, LatentView(z, 0))));
    }
  }
}

TEST(ToyHierarchyTest, TopLayerPriorIsStandardNormal) {
  for (size_t depth = 1; depth <= 3; ++depth) {
    ToyHierarchy model(depth);
    const std::vector<Tensor3> z(depth);
    const ConditionalParams p =
        model.Prior(depth, LatentView(z, depth), Shape3{6, 6, 1});
    for (size_t d = 0; d < p.loc.size(); ++d) {
      EXPECT_EQ(p.loc[d], 0.0);
      EXPECT_EQ(p.scale[d], 1.0);
    }
  }
}

// log N(x; mu, S) by Cholesky on the dense covariance.
double DenseGaussianLogDensity(const std::vector<double>& r,
                               std::vector<std::vector<double>> cov) {
  const size_t n = r.size();
  std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = cov[i][j];
      for (size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = i == j ? std::sqrt(s) : s / l[j][j];
    }
  }
  std::vector<double> y(n);
  double log_det = 0.0;
  double quad = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double s = r[i];
    for (size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
    y[i] = s / l[i][i];
    quad += y[i] * y[i];
    log_det += 2.0 * std::log(l[i][i]);
  }
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

TEST(LinearGaussianTest, MarginalMatchesDenseCovariance) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = 5.0 + 60.0 * rng.Uniform();
    const double b = 60.0 + 120.0 * rng.Uniform();
    const double s = 1.0 + 10.0 * rng.Uniform();
    LinearGaussianToy lg(a, b, s);
    const Shape3 shape{1 + rng.Below(5), 1 + rng.Below(5), 1 + rng.Below(3)};
    const Image x = testing::RandomNoiseImage(rng, shape);
    // Pixels sharing a 2x2 block and channel share one latent.
    const size_t n = shape.size();
    std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
    std::vector<double> r(n);
    for (size_t p = 0; p < n; ++p) {
      r[p] = x.data[p] - b;
      const size_t ip = p / (shape.w * shape.c), jp = p / shape.c % shape.w,
                   cp = p % shape.c;
      for (size_t q = 0; q < n; ++q) {
        const size_t iq = q / (shape.w * shape.c), jq = q / shape.c % shape.w,
                     cq = q % shape.c;
        const bool same =
            ip / 2 == iq / 2 && jp / 2 == jq / 2 && cp == cq;
        cov[p][q] = (same ? a * a : 0.0) + (p == q ? s * s : 0.0);
      }
    }
    const double want =
        -DenseGaussianLogDensity(r, cov) / (std::numbers::ln2 * n);
    EXPECT_NEAR(lg.ExactLogMarginalBits(x), want, 1e-9 * std::abs(want) + 1e-12);
  }
}

TEST(LinearGaussianTest, SinglePixelIsScalarConvolution) {
  LinearGaussianToy lg(3.0, 100.0, 4.0);
  Image x(Shape3{1, 1, 1});
  x.data[0] = 110;
  // z ~ N(0, 1), x | z ~ N(b + a z, s^2): x ~ N(b, a^2 + s^2) = N(100, 25).
  const double var = 25.0;
  const double want =
      0.5 * std::log2(2.0 * std::numbers::pi * var) +
      100.0 / (2.0 * var) / std::numbers::ln2;
  EXPECT_NEAR(lg.ExactLogMarginalBits(x), want, 1e-12);
}

TEST(LinearGaussianTest, PosteriorIsExact) {
  LinearGaussianToy lg(8.0, 127.5, 2.0);
  Image x(Shape3{2, 2, 1});
  x.data = {130, 134, 126, 138};
  const std::vector<Tensor3> none;
  const ConditionalParams q = lg.Posterior(1, LatentView(none, 1), x);
  // Precision 1 + n a^2 / s^2, mean a * sum(r) / s^2 / precision.
  const double prec = 1.0 + 4.0 * 64.0 / 4.0;
  const double sum = (130 + 134 + 126 + 138) - 4 * 127.5;
  ASSERT_EQ(q.loc.size(), 1u);
  EXPECT_NEAR(q.scale[0], 1.0 / std::sqrt(prec), 1e-12);
  EXPECT_NEAR(q.loc[0], 8.0 * sum / 4.0 / prec, 1e-12);
}

double MeanElbo(const LatentHierarchyModel& model, Shape3 shape, int count,
                uint64_t seed) {
  Rng rng(seed);
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    const Image x = SampleImage(model, shape, rng);
    total += EstimateElbo(model, x, 4, rng).bits_per_dim;
  }
  return total / count;
}

TEST(ToyHierarchyTest, RateGeneralizesFrom16To32) {
  for (size_t depth = 1; depth <= 3; ++depth) {
    ToyHierarchy model(depth);
    const double r16 = MeanElbo(model, {16, 16, 1}, 32, 1);
    const double r32 = MeanElbo(model, {32, 32, 1}, 8, 2);
    EXPECT_NEAR(r32 / r16, 1.0, 0.05) << "depth " << depth;
  }
}

TEST(SampleImageTest, DeterministicForASeed) {
  const auto model = BuildToyModel("toy3");
  Rng a(9), b(9), c(10);
  const Image xa = SampleImage(*model, {12, 12, 3}, a);
  EXPECT_EQ(xa, SampleImage(*model, {12, 12, 3}, b));
  EXPECT_NE(xa, SampleImage(*model, {12, 12, 3}, c));
}

}  // namespace
}  // namespace hllc
