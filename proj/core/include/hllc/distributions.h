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

// Continuous location-scale families used by the models, and their
// discretizations onto the 8-bit pixel alphabet.

#ifndef HLLC_DISTRIBUTIONS_H_
#define HLLC_DISTRIBUTIONS_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "hllc/ans.h"
#include "hllc/random.h"

namespace hllc {

enum class Family : uint8_t { kGaussian = 0, kLogistic = 1 };

std::string_view FamilyName(Family family);

// Standardized (location 0, scale 1) functions.
double StdCdf(Family family, double t);
double StdSurvival(Family family, double t);
double StdLogPdf(Family family, double t);
double StdSample(Family family, Rng& rng);

// Mass of [lo, hi] under the standardized law. Differences of survival
// functions are used on the upper side so tails keep their precision.
double StdIntervalMass(Family family, double lo, double hi);

inline double LogPdf(Family family, double loc, double scale, double x) {
  return StdLogPdf(family, (x - loc) / scale) - std::log(scale);
}

inline constexpr int kPixelLevels = 256;

// Mass of pixel value v: the bin [v - 0.5, v + 0.5], with the outer bins
// extended to cover the tails.
double PixelMass(Family family, double loc, double scale, int v);
double PixelLogProb(Family family, double loc, double scale, int v);
void PixelPmf(Family family, double loc, double scale,
              std::span<double> out);  // kPixelLevels entries
QuantizedDistribution PixelDistribution(Family family, double loc, double scale,
                                        unsigned precision);
// Draws a pixel value exactly distributed as PixelMass.
int SamplePixel(Family family, double loc, double scale, Rng& rng);

}  // namespace hllc

#endif  // HLLC_DISTRIBUTIONS_H_
