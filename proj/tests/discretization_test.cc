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

#include "hllc/discretization.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "test_support.h"

namespace hllc {
namespace {

using testing::DrawSymbol;

double Phi(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }
double LogisticCdf(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double OracleCdf(Family family, double t) {
  return family == Family::kGaussian ? Phi(t) : LogisticCdf(t);
}

// Closed-form quantile for the logistic; bisection for the Gaussian.
double OracleQuantile(Family family, double p) {
  if (family == Family::kLogistic) return std::log(p / (1.0 - p));
  double lo = -40.0, hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (Phi(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double MaxMassDeviation(const DiscretizationGrid& grid,
                        const std::function<double(double)>& cdf) {
  double worst = 0.0;
  const double target = 1.0 / static_cast<double>(grid.n_bins());
  for (size_t k = 0; k < grid.n_bins(); ++k) {
    worst = std::max(worst, std::abs(cdf(grid.edges[k + 1]) - cdf(grid.edges[k]) - target));
  }
  return worst;
}

TEST(EqualMassBinsTest, StandardGaussianHalves) {
  const DiscretizationGrid grid = MakeEqualMassBins(Phi, 2);
  ASSERT_EQ(grid.edges.size(), 3u);
  EXPECT_EQ(grid.edges[0], -std::numeric_limits<double>::infinity());
  EXPECT_NEAR(grid.edges[1], 0.0, 1e-12);
  EXPECT_EQ(grid.edges[2], std::numeric_limits<double>::infinity());
  EXPECT_NEAR(grid.centers[0], -0.6744897501960817, 1e-9);
  EXPECT_NEAR(grid.centers[1], 0.6744897501960817, 1e-9);
  EXPECT_NEAR(IndexToCenter(grid, 1), 0.6745, 1e-4);
}

TEST(EqualMassBinsTest, UniformQuarters) {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const DiscretizationGrid grid = MakeEqualMassBins(uniform, 4);
  const std::vector<double> edges = {0.25, 0.5, 0.75};
  const std::vector<double> centers = {0.125, 0.375, 0.625, 0.875};
  for (size_t k = 0; k < 3; ++k) EXPECT_NEAR(grid.edges[k + 1], edges[k], 1e-12);
  for (size_t k = 0; k < 4; ++k) EXPECT_NEAR(grid.centers[k], centers[k], 1e-12);
  EXPECT_NEAR(IndexToCenter(grid, 2), 0.625, 1e-12);
  const std::vector<uint32_t> idx = {3, 0, 2, 2};
  const std::vector<double> mapped = IndexToCenter(grid, idx);
  for (size_t k = 0; k < idx.size(); ++k) EXPECT_EQ(mapped[k], grid.centers[idx[k]]);
  EXPECT_THROW(IndexToCenter(grid, 4), AnsError);
}

TEST(EqualMassBinsTest, StandardGridsMatchQuantileOracle) {
  for (Family family : {Family::kGaussian, Family::kLogistic}) {
    for (size_t n : {size_t{2}, size_t{16}, size_t{256}, size_t{4096}}) {
      const DiscretizationGrid& grid = StandardGrid(family, n);
      for (size_t k = 1; k < n; k += std::max<size_t>(1, n / 64)) {
        EXPECT_NEAR(grid.edges[k], OracleQuantile(family, double(k) / n), 1e-9);
      }
      for (size_t k = 0; k < n; ++k) {
        ASSERT_LT(grid.edges[k], grid.centers[k]);
        ASSERT_LT(grid.centers[k], grid.edges[k + 1]);
      }
      EXPECT_LE(MaxMassDeviation(grid, [family](double t) { return OracleCdf(family, t); }),
                1e-6);
    }
  }
}

TEST(EqualMassBinsTest, AffineEquivariance) {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Family family = trial % 2 ? Family::kLogistic : Family::kGaussian;
    const double loc = 10 * rng.Normal();
    const double scale = std::exp(rng.Normal());
    auto cdf = [&](double x) { return OracleCdf(family, (x - loc) / scale); };
    const DiscretizationGrid direct = MakeEqualMassBins(cdf, 64);
    const DiscretizationGrid affine = AffineGrid(StandardGrid(family, 64), loc, scale);
    for (size_t k = 1; k < 64; ++k) {
      EXPECT_NEAR(direct.edges[k], affine.edges[k], 1e-9 * (1 + std::abs(loc)));
    }
    for (size_t k = 0; k < 64; ++k) {
      EXPECT_NEAR(direct.centers[k], affine.centers[k], 1e-9 * (1 + std::abs(loc)));
    }
    EXPECT_LE(MaxMassDeviation(affine, cdf), 1e-6);
    EXPECT_EQ(affine.edges.front(), -std::numeric_limits<double>::infinity());
    EXPECT_EQ(affine.edges.back(), std::numeric_limits<double>::infinity());
  }
}

TEST(EqualMassBinsTest, RandomConditionalsStayEqualMass) {
  Rng rng(62);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const Family family = trial % 2 ? Family::kLogistic : Family::kGaussian;
    const double loc = 20 * (rng.Uniform() - 0.5);
    const double scale = std::exp(4 * (rng.Uniform() - 0.5));
    auto cdf = [&](double x) { return OracleCdf(family, (x - loc) / scale); };
    for (size_t n : {size_t{2}, size_t{16}, size_t{4096}}) {
      worst = std::max(worst, MaxMassDeviation(
                                  AffineGrid(StandardGrid(family, n), loc, scale), cdf));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(EqualMassBinsTest, Determinism) {
  const DiscretizationGrid a = MakeEqualMassBins(Phi, 128);
  const DiscretizationGrid b = MakeEqualMassBins(Phi, 128);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(&StandardGrid(Family::kGaussian, 128), &StandardGrid(Family::kGaussian, 128));
}

TEST(EqualMassBinsTest, RejectsBadArguments) {
  EXPECT_THROW(MakeEqualMassBins(Phi, 1), AnsError);
  EXPECT_THROW(MakeEqualMassBins(Phi, 12), AnsError);
  EXPECT_THROW(MakeEqualMassBins(Phi, size_t{1} << 17), AnsError);
  auto stuck = [](double x) { return 0.25 + 0.5 * Phi(x); };
  EXPECT_THROW(MakeEqualMassBins(stuck, 4), AnsError);
}

TEST(PosteriorIndexTest, PriorAsPosteriorIsUniform) {
  for (Family family : {Family::kGaussian, Family::kLogistic}) {
    for (size_t n : {size_t{2}, size_t{256}, size_t{4096}}) {
      const LocScale prior{family, 1.5, 2.0};
      const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
      for (unsigned r : {bits, 16u, 24u}) {
        if (r < bits) continue;
        const QuantizedDistribution q = PosteriorIndexDistribution(prior, prior, n, r);
        EXPECT_EQ(q, Quantize(std::vector<double>(n, 1.0), r)) << n << " " << r;
      }
      // With precision log2(n) the codec is bit-identical to the uniform one.
      const DiscretizationGrid grid = AffineGrid(StandardGrid(family, n), 1.5, 2.0);
      auto cdf = [family](double x) { return OracleCdf(family, (x - 1.5) / 2.0); };
      const SymbolCodec q = PosteriorIndexCodec(grid, cdf, bits);
      const SymbolCodec u = UniformCodec(static_cast<uint32_t>(n));
      Rng rng(63);
      const ShapedMessage start = testing::RandomMessage(rng, HeadShape::Flat(5), 2);
      Symbols v(5);
      for (uint32_t& s : v) s = static_cast<uint32_t>(rng.Below(n));
      EXPECT_EQ(q.Push(start, v), u.Push(start, v));
    }
  }
}

TEST(PosteriorIndexTest, PointMassTakesEverythingButTheFloor) {
  const size_t n = 64;
  const LocScale prior{Family::kGaussian, 0.0, 1.0};
  const double center = IndexToCenter(prior, n, 37);
  const LocScale posterior{Family::kGaussian, center, 1e-9};
  const QuantizedDistribution q = PosteriorIndexDistribution(prior, posterior, n, 16);
  EXPECT_EQ(q.frequency(37), (1u << 16) - (n - 1));
}

TEST(PosteriorIndexTest, MassesMatchNumericalDifferencing) {
  const size_t n = 8;
  const LocScale prior{Family::kGaussian, 0.0, 1.0};
  const LocScale posterior{Family::kGaussian, 0.5, 0.5};
  std::vector<double> masses(n);
  PosteriorIndexMasses(prior, posterior, n, masses);
  std::vector<double> oracle(n);
  double prev = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const double edge = k + 1 < n ? OracleQuantile(Family::kGaussian, double(k + 1) / n)
                                  : std::numeric_limits<double>::infinity();
    const double at = Phi((edge - 0.5) / 0.5);
    oracle[k] = at - prev;
    prev = at;
    EXPECT_NEAR(masses[k], oracle[k], 1e-9) << k;
  }
  // The grid-based path agrees with the location-scale path.
  const DiscretizationGrid& grid = StandardGrid(Family::kGaussian, n);
  const std::vector<double> via_grid =
      PosteriorIndexMasses(grid, [](double x) { return Phi((x - 0.5) / 0.5); });
  for (size_t k = 0; k < n; ++k) EXPECT_NEAR(via_grid[k], oracle[k], 1e-12);

  const QuantizedDistribution q = PosteriorIndexDistribution(prior, posterior, n, 16);
  EXPECT_EQ(q, Quantize(oracle, 16));
  const SymbolCodec codec = CategoricalCodec({q});
  Rng rng(64);
  ShapedMessage msg(HeadShape::Flat(1));
  double info = 0.0;
  std::vector<uint32_t> pushed;
  for (int k = 0; k < 100000; ++k) {
    const uint32_t i = DrawSymbol(q, rng);
    info += q.InformationBits(i);
    pushed.push_back(i);
    codec.push(msg, msg.all_lanes(), {i});
  }
  const double excess = 32.0 * Flatten(msg).size() - info;
  EXPECT_GE(excess, 0.0);
  EXPECT_LE(excess, 64.0);
  for (size_t k = pushed.size(); k-- > 0;) {
    ASSERT_EQ(codec.pop(msg, msg.all_lanes())[0], pushed[k]);
  }
}

TEST(PosteriorIndexTest, RandomPosteriorsQuantizeToFullPrecision) {
  Rng rng(65);
  for (int trial = 0; trial < 200; ++trial) {
    const Family family = trial % 2 ? Family::kLogistic : Family::kGaussian;
    const LocScale prior{family, rng.Normal(), std::exp(rng.Normal())};
    const LocScale posterior{family, rng.Normal() * 3, std::exp(rng.Normal() - 1)};
    const size_t n = size_t{1} << (1 + rng.Below(12));
    std::vector<double> masses(n);
    PosteriorIndexMasses(prior, posterior, n, masses);
    double total = 0.0;
    for (double m : masses) {
      EXPECT_GE(m, 0.0);
      total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    const QuantizedDistribution q = PosteriorIndexDistribution(prior, posterior, n, 24);
    EXPECT_EQ(q.cumulative(static_cast<uint32_t>(n)), 1u << 24);
  }
}

TEST(PosteriorIndexTest, NegativeMassIsRejected) {
  const DiscretizationGrid& grid = StandardGrid(Family::kGaussian, 4);
  auto broken = [](double x) { return x < 0.5 ? Phi(x) : Phi(x) - 0.3; };
  EXPECT_THROW(PosteriorIndexMasses(grid, broken), AnsError);
  EXPECT_THROW(PosteriorIndexCodec(grid, broken, 16), AnsError);
}

}  // namespace
}  // namespace hllc
