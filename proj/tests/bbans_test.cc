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

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hllc/codec.h"
#include "hllc/discretization.h"
#include "hllc/distributions.h"
#include "hllc/toy_models.h"
#include "test_support.h"

namespace hllc {
namespace {

using testing::CeilLog2;
using testing::RandomMessage;
using testing::RandomNoiseImage;

size_t SeedFor(const LatentHierarchyModel& model, Shape3 shape) {
  return 2 +
         WorstCaseGrowWords(1, BbansHeadShape(model, shape).lane_count()) +
         LatentDims(model, shape);
}

ShapedMessage SeededMessage(const LatentHierarchyModel& model, Shape3 shape,
                            uint64_t seed) {
  Rng rng(seed);
  return Unflatten(RandomSeedWords(SeedFor(model, shape), rng),
                   BbansHeadShape(model, shape));
}

TEST(BbansConfigTest, PosteriorPrecisionHasHeadroomAndCap) {
  for (unsigned bins = 1; bins <= 16; ++bins) {
    for (unsigned prec = 8; prec <= 24; ++prec) {
      BbansConfig c{bins, prec};
      const unsigned want = std::min(24u, std::max(prec, bins + 12));
      EXPECT_EQ(c.posterior_precision(), want);
      EXPECT_LE(c.posterior_precision(), kMaxPrecision);
      EXPECT_NO_THROW(c.Validate());
    }
  }
  EXPECT_THROW((BbansConfig{0, 16}.Validate()), AnsError);
  EXPECT_THROW((BbansConfig{17, 16}.Validate()), AnsError);
  EXPECT_THROW((BbansConfig{12, 7}.Validate()), AnsError);
  EXPECT_THROW((BbansConfig{12, 25}.Validate()), AnsError);
}

TEST(BbansHeadShapeTest, LeavesFollowLatentShapes) {
  ToyHierarchy model(3);
  const Shape3 img{13, 6, 3};
  const HeadShape head = BbansHeadShape(model, img);
  ASSERT_EQ(head.leaf_count(), 4u);
  EXPECT_EQ(head.leaf_size(0), img.size());
  size_t latents = 0;
  for (size_t l = 1; l <= 3; ++l) {
    EXPECT_EQ(head.leaf_size(l), model.LatentShape(l, img).size());
    latents += head.leaf_size(l);
  }
  EXPECT_EQ(LatentDims(model, img), latents);
  EXPECT_EQ(head.lane_count(), img.size() + latents);
}

class BbansInverseTest
    : public ::testing::TestWithParam<std::tuple<size_t, Shape3>> {};

TEST_P(BbansInverseTest, PopUndoesPushExactly) {
  const auto [depth, shape] = GetParam();
  ToyHierarchy model(depth);
  const BbansConfig config;
  Rng rng(100 * depth + shape.size());
  for (int trial = 0; trial < 4; ++trial) {
    const Image x = trial % 2 == 0 ? SampleImage(model, shape, rng)
                                   : RandomNoiseImage(rng, shape);
    ShapedMessage msg = trial < 2 ? SeededMessage(model, shape, trial)
                                  : RandomMessage(rng,
                                                  BbansHeadShape(model, shape),
                                                  LatentDims(model, shape));
    const ShapedMessage before = msg;
    BbansPush(msg, x, model, config);
    EXPECT_FALSE(msg == before);
    EXPECT_EQ(BbansPop(msg, shape, model, config), x);
    EXPECT_TRUE(msg == before);
  }
}

INSTANTIATE_TEST_SUITE_P(
    DepthsAndShapes, BbansInverseTest,
    ::testing::Combine(::testing::Values(size_t{1}, size_t{2}, size_t{3}),
                       ::testing::Values(Shape3{1, 1, 1}, Shape3{8, 8, 1},
                                         Shape3{16, 16, 3}, Shape3{5, 9, 2})));

TEST(BbansTest, EveryPixelValueRoundTripsOnOnePixel) {
  ToyHierarchy model(2);
  const BbansConfig config;
  const Shape3 shape{1, 1, 1};
  for (int v = 0; v < 256; ++v) {
    Image x(shape);
    x.data[0] = static_cast<uint8_t>(v);
    ShapedMessage msg = SeededMessage(model, shape, v);
    const ShapedMessage before = msg;
    BbansPush(msg, x, model, config);
    ASSERT_EQ(BbansPop(msg, shape, model, config), x) << "value " << v;
    ASSERT_TRUE(msg == before);
  }
}

TEST(BbansTest, LinearGaussianAndCoarseConfigsRoundTrip) {
  LinearGaussianToy lg;
  Rng rng(7);
  for (unsigned bins : {1u, 4u, 8u, 16u}) {
    for (unsigned prec : {8u, 12u, 24u}) {
      const BbansConfig config{bins, prec};
      const Shape3 shape{6, 7, 1};
      const Image x = SampleImage(lg, shape, rng);
      ShapedMessage msg = SeededMessage(lg, shape, bins * 100 + prec);
      const ShapedMessage before = msg;
      BbansPush(msg, x, lg, config);
      EXPECT_EQ(BbansPop(msg, shape, lg, config), x);
      EXPECT_TRUE(msg == before);
    }
  }
}

TEST(BbansTest, TraceMatchesMeasuredLengthChange) {
  Rng rng(11);
  for (size_t depth = 1; depth <= 3; ++depth) {
    ToyHierarchy model(depth);
    const BbansConfig config;
    const Shape3 shape{8, 8, 1};
    const Image x = SampleImage(model, shape, rng);
    ShapedMessage msg = SeededMessage(model, shape, depth);
    const double before = msg.InformationBits();
    BbansTrace trace;
    BbansPush(msg, x, model, config, &trace);
    const double delta = msg.InformationBits() - before;
    // Each coder step may lose up to log2(1 + 2^(p - 32)) bits to the floor.
    const double steps =
        static_cast<double>(shape.size() + 2 * LatentDims(model, shape));
    EXPECT_NEAR(delta, trace.NetBits(),
                steps * std::log2(1.0 + std::ldexp(1.0, 24 - 32)));
    EXPECT_DOUBLE_EQ(trace.prior_bits,
                     12.0 * static_cast<double>(LatentDims(model, shape)));
    ASSERT_EQ(trace.indices.size(), depth);
    for (size_t l = 1; l <= depth; ++l) {
      EXPECT_EQ(trace.indices[l - 1].size(), model.LatentShape(l, shape).size());
      for (uint32_t i : trace.indices[l - 1]) EXPECT_LT(i, config.n_bins());
    }
    EXPECT_GT(trace.posterior_bits, 0.0);
    EXPECT_GT(trace.likelihood_bits, 0.0);
  }
}

// Depth one, written out step by step from the library's primitives: pop the
// posterior indices, push the pixels, push the indices uniformly.
TEST(BbansTest, DepthOneMatchesSingleLayerProcedure) {
  LinearGaussianToy lg(30.0, 120.0, 6.0);
  ToyHierarchy toy(1);
  Rng rng(21);
  const std::vector<const LatentHierarchyModel*> models = {&lg, &toy};
  for (const LatentHierarchyModel* model : models) {
    const BbansConfig config{10, 14};
    const Shape3 shape{6, 5, 1};
    const Image x = SampleImage(*model, shape, rng);
    ShapedMessage msg = SeededMessage(*model, shape, 5);
    ShapedMessage oracle = msg;
    BbansPush(msg, x, *model, config);

    const HeadShape head = BbansHeadShape(*model, shape);
    const LaneSpan z_lanes{head.leaf_offset(1), head.leaf_size(1)};
    const LaneSpan x_lanes{0, shape.size()};
    const std::vector<Tensor3> none;
    const ConditionalParams prior = model->Prior(1, LatentView(none, 1), shape);
    const ConditionalParams post = model->Posterior(1, LatentView(none, 1), x);
    std::vector<QuantizedDistribution> q;
    for (size_t d = 0; d < z_lanes.count; ++d) {
      q.push_back(PosteriorIndexDistribution(
          {prior.family, prior.loc[d], prior.scale[d]},
          {post.family, post.loc[d], post.scale[d]}, config.n_bins(),
          config.posterior_precision()));
    }
    const std::vector<uint32_t> idx = VPopInPlace(oracle, z_lanes, q);
    std::vector<Tensor3> z(1, Tensor3(model->LatentShape(1, shape)));
    for (size_t d = 0; d < idx.size(); ++d) {
      z[0].data[d] = IndexToCenter({prior.family, prior.loc[d], prior.scale[d]},
                                   config.n_bins(), idx[d]);
    }
    const PixelParams lik = model->Likelihood(LatentView(z, 0), shape);
    std::vector<QuantizedDistribution> px;
    for (size_t p = 0; p < shape.size(); ++p) {
      px.push_back(PixelDistribution(lik.family, lik.loc[p], lik.scale[p],
                                     config.precision));
    }
    const std::vector<uint32_t> pixels(x.data.begin(), x.data.end());
    VPushInPlace(oracle, x_lanes, pixels, px);
    UniformCodec(static_cast<uint32_t>(config.n_bins()))
        .push(oracle, z_lanes, idx);

    EXPECT_TRUE(msg == oracle) << model->name();
  }
}

TEST(BbansTest, ChainIsLastInFirstOutAndLeavesTheSeed) {
  ToyHierarchy model(2);
  const BbansConfig config;
  const Shape3 shape{8, 8, 1};
  Rng rng(31);
  std::vector<Image> images;
  for (int k = 0; k < 6; ++k) images.push_back(SampleImage(model, shape, rng));
  SeedPolicy policy;
  policy.rng_seed = 99;
  const ChainResult r = ChainCompress(images, model, config, policy);
  ASSERT_EQ(r.net_bits.size(), images.size());
  EXPECT_EQ(r.total_bits(), 32.0 * r.words.size());
  EXPECT_LE(r.seed_words, SeedFor(model, shape));

  std::vector<uint32_t> residual;
  const std::vector<Image> back =
      ChainDecompress(r.words, shape, images.size(), model, config, &residual);
  EXPECT_EQ(back, images);

  // The residual is the untouched top of the original seed.
  Rng seed_rng(policy.rng_seed);
  const std::vector<uint32_t> full =
      RandomSeedWords(SeedFor(model, shape), seed_rng);
  ASSERT_EQ(residual.size(), r.seed_words);
  EXPECT_TRUE(std::equal(residual.begin(), residual.end(),
                         full.end() - static_cast<long>(r.seed_words)));

  // The content costs the summed net bits, up to the fold overhead of a
  // multi-lane head.
  double net = 0.0;
  for (double b : r.net_bits) net += b;
  const double lanes = static_cast<double>(BbansHeadShape(model, shape).lane_count());
  const double slack = 64.0 + 32.0 * (1.0 + CeilLog2(static_cast<size_t>(lanes)));
  EXPECT_NEAR(r.total_bits() - r.seed_bits(), net, slack);
}

TEST(BbansTest, ChainOfNothingAndExplicitSeed) {
  ToyHierarchy model(1);
  const BbansConfig config;
  const ChainResult empty = ChainCompress({}, model, config, {});
  EXPECT_TRUE(empty.words.empty());
  EXPECT_EQ(empty.seed_words, 0u);

  const Shape3 shape{4, 4, 1};
  Rng rng(3);
  std::vector<Image> images = {SampleImage(model, shape, rng)};
  SeedPolicy policy;
  policy.seed_words = 400;
  const ChainResult r = ChainCompress(images, model, config, policy);
  EXPECT_EQ(r.seed_words, 400u);
  EXPECT_EQ(ChainDecompress(r.words, shape, 1, model, config), images);
}

TEST(BbansTest, ErrorModeRunsOutOfBits) {
  ToyHierarchy model(2);
  const BbansConfig config;
  const Shape3 shape{8, 8, 1};
  Rng rng(4);
  std::vector<Image> images = {SampleImage(model, shape, rng)};
  SeedPolicy policy;
  policy.mode = SeedPolicy::Mode::kError;
  EXPECT_THROW(ChainCompress(images, model, config, policy),
               InsufficientBitsError);
  ShapedMessage fresh(BbansHeadShape(model, shape));
  EXPECT_THROW(BbansPush(fresh, images[0], model, config),
               InsufficientBitsError);
}

TEST(BbansTest, WrongHeadShapeIsRejected) {
  ToyHierarchy model(2);
  ShapedMessage msg(HeadShape::Flat(5));
  Image x(Shape3{2, 2, 1});
  EXPECT_THROW(BbansPush(msg, x, model, BbansConfig{}), AnsError);
  EXPECT_THROW(BbansPop(msg, x.shape, model, BbansConfig{}), AnsError);
}

TEST(BbansTest, DecodingWithAnotherModelDoesNotRecoverTheImage) {
  const auto enc = BuildToyModel("toy2");
  const auto dec = BuildToyModel("toy2", 5);
  ASSERT_NE(enc->digest(), dec->digest());
  const BbansConfig config;
  const Shape3 shape{8, 8, 1};
  Rng rng(8);
  std::vector<Image> images;
  for (int k = 0; k < 3; ++k) images.push_back(SampleImage(*enc, shape, rng));
  const ChainResult r = ChainCompress(images, *enc, config, {});
  bool recovered = false;
  try {
    recovered = ChainDecompress(r.words, shape, images.size(), *dec, config) ==
                images;
  } catch (const AnsError&) {
    recovered = false;
  }
  EXPECT_FALSE(recovered);
}

TEST(BbansElboTest, LinearGaussianMatchesExactMarginal) {
  LinearGaussianToy lg;
  Rng rng(12);
  const Shape3 shape{8, 8, 1};
  for (int k = 0; k < 5; ++k) {
    const Image x = SampleImage(lg, shape, rng);
    const ElboEstimate e = EstimateElbo(lg, x, 256, rng);
    const double exact = lg.ExactLogMarginalBits(x);
    // With the exact posterior the bound is tight, so every sample agrees.
    EXPECT_NEAR(e.bits_per_dim, exact, 3.0 * e.standard_error + 1e-9);
    EXPECT_LT(e.standard_error, 1e-6);
  }
}

TEST(BbansElboTest, BoundIsAboveMarginalForToyModels) {
  Rng rng(13);
  for (size_t depth = 1; depth <= 3; ++depth) {
    ToyHierarchy model(depth);
    const Image x = SampleImage(model, {8, 8, 1}, rng);
    const ElboEstimate e = EstimateElbo(model, x, 16, rng);
    EXPECT_TRUE(std::isfinite(e.bits_per_dim));
    EXPECT_GT(e.bits_per_dim, 0.0);
    EXPECT_LT(e.bits_per_dim, 8.0 + 4.0);
    EXPECT_GT(e.standard_error, 0.0);
  }
}

TEST(BbansElboTest, SingleSampleIsReproducible) {
  ToyHierarchy model(2);
  Rng data(1);
  const Image x = SampleImage(model, {6, 6, 1}, data);
  Rng a(77);
  Rng b(77);
  const ElboEstimate ea = EstimateElbo(model, x, 1, a);
  const ElboEstimate eb = EstimateElbo(model, x, 1, b);
  EXPECT_EQ(ea.bits_per_dim, eb.bits_per_dim);
  EXPECT_EQ(ea.standard_error, 0.0);
  Rng c(0);
  EXPECT_THROW(EstimateElbo(model, x, 0, c), AnsError);
}

TEST(LatentViewTest, OnlyLayersAboveAreVisible) {
  std::vector<Tensor3> z(3, Tensor3(Shape3{1, 1, 1}));
  const LatentView from2(z, 2);
  EXPECT_EQ(from2.visible_from(), 3u);
  EXPECT_NO_THROW(from2.layer(3));
  EXPECT_THROW(from2.layer(2), std::out_of_range);
  EXPECT_THROW(from2.layer(1), std::out_of_range);
  EXPECT_THROW(from2.layer(4), std::out_of_range);
  const LatentView all(z, 0);
  for (size_t l = 1; l <= 3; ++l) EXPECT_NO_THROW(all.layer(l));
}

// A posterior that reads its own layer is caught by the view during encoding.
class PeekingModel : public ToyHierarchy {
 public:
  PeekingModel() : ToyHierarchy(2) {}
  ConditionalParams Posterior(size_t layer, const LatentView& above,
                              const Image& x) const override {
    (void)above.layer(layer);
    return ToyHierarchy::Posterior(layer, above, x);
  }
};

TEST(LatentViewTest, PeekingPosteriorIsRejected) {
  PeekingModel model;
  const Shape3 shape{4, 4, 1};
  Rng rng(2);
  const Image x = SampleImage(model, shape, rng);
  ShapedMessage msg = SeededMessage(model, shape, 1);
  EXPECT_THROW(BbansPush(msg, x, model, BbansConfig{}), std::out_of_range);
}

}  // namespace
}  // namespace hllc
