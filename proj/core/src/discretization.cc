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

#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

namespace hllc {
namespace {

constexpr int kBisections = 60;
constexpr double kInf = std::numeric_limits<double>::infinity();

double InverseCdf(const std::function<double(double)>& cdf, double p) {
  double lo = -1.0;
  double hi = 1.0;
  for (int k = 0; cdf(lo) >= p; ++k) {
    if (k == 64) throw AnsError("cdf does not approach 0 on the left");
    lo *= 2.0;
  }
  for (int k = 0; cdf(hi) <= p; ++k) {
    if (k == 64) throw AnsError("cdf does not approach 1 on the right");
    hi *= 2.0;
  }
  for (int k = 0; k < kBisections; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DiscretizationGrid MakeEqualMassBins(const std::function<double(double)>& cdf,
                                     size_t n_bins) {
  if (n_bins < 2 || n_bins > (size_t{1} << 16) || !std::has_single_bit(n_bins)) {
    throw AnsError("n_bins must be a power of two in [2, 2^16], got " +
                   std::to_string(n_bins));
  }
  DiscretizationGrid grid;
  grid.edges.resize(n_bins + 1);
  grid.centers.resize(n_bins);
  const double n = static_cast<double>(n_bins);
  grid.edges.front() = -kInf;
  grid.edges.back() = kInf;
  for (size_t k = 1; k < n_bins; ++k) {
    grid.edges[k] = InverseCdf(cdf, static_cast<double>(k) / n);
  }
  for (size_t k = 0; k < n_bins; ++k) {
    grid.centers[k] = InverseCdf(cdf, (static_cast<double>(k) + 0.5) / n);
  }
  return grid;
}

const DiscretizationGrid& StandardGrid(Family family, size_t n_bins) {
  static std::mutex mu;
  static std::map<std::pair<Family, size_t>,
                  std::unique_ptr<const DiscretizationGrid>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{family, n_bins}];
  if (!slot) {
    slot = std::make_unique<const DiscretizationGrid>(MakeEqualMassBins(
        [family](double t) { return StdCdf(family, t); }, n_bins));
  }
  return *slot;
}

DiscretizationGrid AffineGrid(const DiscretizationGrid& standard, double loc,
                              double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(loc)) {
    throw AnsError("conditional needs finite loc and positive scale");
  }
  DiscretizationGrid grid = standard;
  for (double& e : grid.edges) e = loc + scale * e;
  for (double& c : grid.centers) c = loc + scale * c;
  return grid;
}

std::vector<double> PosteriorIndexMasses(
    const DiscretizationGrid& grid, const std::function<double(double)>& cdf) {
  std::vector<double> at(grid.edges.size());
  for (size_t k = 0; k < at.size(); ++k) at[k] = cdf(grid.edges[k]);
  std::vector<double> mass(grid.n_bins());
  for (size_t k = 0; k < mass.size(); ++k) {
    mass[k] = at[k + 1] - at[k];
    if (mass[k] < 0.0) {
      throw AnsError("posterior cdf is not monotone: bin " + std::to_string(k) +
                     " has negative mass");
    }
  }
  return mass;
}

SymbolCodec PosteriorIndexCodec(const DiscretizationGrid& grid,
                                const std::function<double(double)>& cdf,
                                unsigned precision) {
  return CategoricalCodec({Quantize(PosteriorIndexMasses(grid, cdf), precision)});
}

void PosteriorIndexMasses(const LocScale& prior, const LocScale& posterior,
                          size_t n_bins, std::span<double> out) {
  if (out.size() != n_bins) throw AnsError("mass buffer has the wrong size");
  if (!(prior.scale > 0.0) || !(posterior.scale > 0.0) ||
      !std::isfinite(prior.loc) || !std::isfinite(posterior.loc) ||
      !std::isfinite(prior.scale) || !std::isfinite(posterior.scale)) {
    throw AnsError("conditional needs finite loc and positive scale");
  }
  const DiscretizationGrid& standard = StandardGrid(prior.family, n_bins);
  const double shift = (prior.loc - posterior.loc) / posterior.scale;
  const double ratio = prior.scale / posterior.scale;
  // Lower-tail values below the posterior median, upper-tail values above;
  // each bin is differenced on the side where both edges are accurate.
  double prev_t = -kInf;
  double prev_cdf = 0.0;
  double prev_sf = 1.0;
  for (size_t k = 0; k < n_bins; ++k) {
    const double t = k + 1 == n_bins ? kInf
                                     : shift + ratio * standard.edges[k + 1];
    double cdf;
    double sf;
    if (t <= 0.0) {
      cdf = StdCdf(posterior.family, t);
      sf = 1.0 - cdf;
    } else {
      sf = StdSurvival(posterior.family, t);
      cdf = 1.0 - sf;
    }
    double m;
    if (prev_t >= 0.0) {
      m = prev_sf - sf;
    } else if (t <= 0.0) {
      m = cdf - prev_cdf;
    } else {
      m = 1.0 - prev_cdf - sf;
    }
    if (m < 0.0) {
      throw AnsError("posterior mass is negative at bin " + std::to_string(k));
    }
    out[k] = m;
    prev_t = t;
    prev_cdf = cdf;
    prev_sf = sf;
  }
}

QuantizedDistribution PosteriorIndexDistribution(const LocScale& prior,
                                                 const LocScale& posterior,
                                                 size_t n_bins,
                                                 unsigned precision) {
  std::vector<double> mass(n_bins);
  PosteriorIndexMasses(prior, posterior, n_bins, mass);
  return Quantize(mass, precision);
}

double IndexToCenter(const DiscretizationGrid& grid, uint32_t index) {
  if (index >= grid.n_bins()) {
    throw AnsError("bin index " + std::to_string(index) + " out of range");
  }
  return grid.centers[index];
}

std::vector<double> IndexToCenter(const DiscretizationGrid& grid,
                                  std::span<const uint32_t> indices) {
  std::vector<double> out(indices.size());
  for (size_t k = 0; k < indices.size(); ++k) {
    out[k] = IndexToCenter(grid, indices[k]);
  }
  return out;
}

}  // namespace hllc
