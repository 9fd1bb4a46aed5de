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

#include "hllc/distributions.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace hllc {

std::string_view FamilyName(Family family) {
  return family == Family::kGaussian ? "gaussian" : "logistic";
}

double StdCdf(Family family, double t) {
  if (family == Family::kGaussian) {
    return 0.5 * std::erfc(-t * std::numbers::sqrt2 / 2.0);
  }
  return 1.0 / (1.0 + std::exp(-t));
}

double StdSurvival(Family family, double t) {
  if (family == Family::kGaussian) {
    return 0.5 * std::erfc(t * std::numbers::sqrt2 / 2.0);
  }
  return 1.0 / (1.0 + std::exp(t));
}

double StdLogPdf(Family family, double t) {
  if (family == Family::kGaussian) {
    return -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double a = -std::abs(t);
  return a - 2.0 * std::log1p(std::exp(a));
}

double StdSample(Family family, Rng& rng) {
  return family == Family::kGaussian ? rng.Normal() : rng.Logistic();
}

double StdIntervalMass(Family family, double lo, double hi) {
  if (lo >= 0.0) return StdSurvival(family, lo) - StdSurvival(family, hi);
  if (hi <= 0.0) return StdCdf(family, hi) - StdCdf(family, lo);
  return 1.0 - StdCdf(family, lo) - StdSurvival(family, hi);
}

double PixelMass(Family family, double loc, double scale, int v) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double lo = v == 0 ? -kInf : (v - 0.5 - loc) / scale;
  const double hi = v == kPixelLevels - 1 ? kInf : (v + 0.5 - loc) / scale;
  return StdIntervalMass(family, lo, hi);
}

double PixelLogProb(Family family, double loc, double scale, int v) {
  return std::log(PixelMass(family, loc, scale, v));
}

void PixelPmf(Family family, double loc, double scale, std::span<double> out) {
  if (out.size() != kPixelLevels) throw AnsError("pixel pmf needs 256 slots");
  // Edge e sits at e - 0.5; edges 0 and 256 are the infinite tails. Each edge
  // gets its cdf and survival value once, from whichever side is accurate.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::array<double, kPixelLevels + 1> t;
  std::array<double, kPixelLevels + 1> cdf;
  std::array<double, kPixelLevels + 1> sf;
  for (int e = 0; e <= kPixelLevels; ++e) {
    t[e] = e == 0 ? -kInf
                  : e == kPixelLevels ? kInf : (e - 0.5 - loc) / scale;
    if (t[e] <= 0.0) {
      cdf[e] = StdCdf(family, t[e]);
      sf[e] = 1.0 - cdf[e];
    } else {
      sf[e] = StdSurvival(family, t[e]);
      cdf[e] = 1.0 - sf[e];
    }
  }
  for (int v = 0; v < kPixelLevels; ++v) {
    double m;
    if (t[v] >= 0.0) {
      m = sf[v] - sf[v + 1];
    } else if (t[v + 1] <= 0.0) {
      m = cdf[v + 1] - cdf[v];
    } else {
      m = 1.0 - cdf[v] - sf[v + 1];
    }
    out[v] = std::max(m, 0.0);
  }
}

QuantizedDistribution PixelDistribution(Family family, double loc, double scale,
                                        unsigned precision) {
  std::array<double, kPixelLevels> pmf;
  PixelPmf(family, loc, scale, pmf);
  return Quantize(pmf, precision);
}

int SamplePixel(Family family, double loc, double scale, Rng& rng) {
  const double x = loc + scale * StdSample(family, rng);
  const double r = std::nearbyint(x);
  if (!(r > 0.0)) return 0;
  if (r >= kPixelLevels - 1) return kPixelLevels - 1;
  return static_cast<int>(r);
}

}  // namespace hllc
