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

// Equal-mass discretization of continuous conditionals, and the posterior
// distribution over bin indices.
//
// For a conditional with cdf F and n bins, edge k is F^-1(k / n) and centre k
// is F^-1((k + 0.5) / n). The outer edges are always -inf and +inf.

#ifndef HLLC_DISCRETIZATION_H_
#define HLLC_DISCRETIZATION_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hllc/ans.h"
#include "hllc/codec.h"
#include "hllc/distributions.h"

namespace hllc {

inline constexpr unsigned kDefaultBinsLog2 = 12;

struct DiscretizationGrid {
  std::vector<double> edges;    // n_bins + 1
  std::vector<double> centers;  // n_bins
  size_t n_bins() const { return centers.size(); }
};

// Inverse-cdf by bisection (60 halvings of an expanding bracket). Throws
// AnsError if n_bins is not a power of two in [2, 2^16] or the cdf does not
// span (0, 1).
DiscretizationGrid MakeEqualMassBins(const std::function<double(double)>& cdf,
                                     size_t n_bins);

// MakeEqualMassBins of the standardized family, computed once per
// (family, n_bins) and shared. Location-scale conditionals use it through
// quantile equivariance: F^-1_{loc,scale}(p) = loc + scale * F^-1(p).
const DiscretizationGrid& StandardGrid(Family family, size_t n_bins);
DiscretizationGrid AffineGrid(const DiscretizationGrid& standard, double loc,
                              double scale);

// Masses of the grid's bins under a posterior cdf. Throws AnsError on a
// negative mass.
std::vector<double> PosteriorIndexMasses(
    const DiscretizationGrid& grid, const std::function<double(double)>& cdf);
SymbolCodec PosteriorIndexCodec(const DiscretizationGrid& grid,
                                const std::function<double(double)>& cdf,
                                unsigned precision);

// Location-scale fast path: bins of the prior (loc, scale) grid under the
// posterior (loc, scale), without materializing the grid.
struct LocScale {
  Family family;
  double loc;
  double scale;
};
void PosteriorIndexMasses(const LocScale& prior, const LocScale& posterior,
                          size_t n_bins, std::span<double> out);
QuantizedDistribution PosteriorIndexDistribution(const LocScale& prior,
                                                 const LocScale& posterior,
                                                 size_t n_bins,
                                                 unsigned precision);

double IndexToCenter(const DiscretizationGrid& grid, uint32_t index);
std::vector<double> IndexToCenter(const DiscretizationGrid& grid,
                                  std::span<const uint32_t> indices);
inline double IndexToCenter(const LocScale& prior, size_t n_bins,
                            uint32_t index) {
  return prior.loc +
         prior.scale * StandardGrid(prior.family, n_bins).centers.at(index);
}

}  // namespace hllc

#endif  // HLLC_DISCRETIZATION_H_
