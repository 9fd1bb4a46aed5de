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

#include "hllc/selftest.h"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hllc/ans.h"
#include "hllc/bbans.h"
#include "hllc/codec.h"
#include "hllc/container.h"
#include "hllc/discretization.h"
#include "hllc/image_codec.h"
#include "hllc/random.h"
#include "hllc/toy_models.h"
#include "hllc/vector_ans.h"

namespace hllc {
namespace {

class Runner {
 public:
  explicit Runner(SelftestReport& report) : report_(report) {}

  // `body` returns an empty string on success, else what went wrong.
  void Check(const std::string& suite, const std::string& name,
             const std::function<std::string()>& body) {
    SelftestCheck check{suite, name, false, ""};
    try {
      check.detail = body();
      check.passed = check.detail.empty();
      if (check.passed) check.detail = "ok";
    } catch (const std::exception& e) {
      check.detail = std::string("exception: ") + e.what();
    }
    report_.checks.push_back(std::move(check));
  }

 private:
  SelftestReport& report_;
};

QuantizedDistribution RandomDistribution(Rng& rng, unsigned precision) {
  const size_t n = 1 + rng.Below(std::min<uint64_t>(300, uint64_t{1} << precision));
  std::vector<double> pmf(n);
  for (double& p : pmf) p = rng.Uniform() < 0.1 ? 0.0 : rng.Uniform();
  pmf[rng.Below(n)] += 1.0;
  return Quantize(pmf, precision);
}

std::string AnsSuite(Rng& rng) {
  for (int trial = 0; trial < 50; ++trial) {
    const unsigned precision = 1 + static_cast<unsigned>(rng.Below(24));
    const QuantizedDistribution d = RandomDistribution(rng, precision);
    ScalarAnsState state;
    std::vector<uint32_t> symbols(200);
    double info = 0.0;
    for (uint32_t& s : symbols) {
      s = static_cast<uint32_t>(rng.Below(d.size()));
      info += d.InformationBits(s);
      state = Push(std::move(state), s, d);
    }
    // Flattened length of the final message against the content pushed.
    const double excess = 64.0 + 32.0 * state.stream.size() - info;
    if (excess < -1e-6 || excess > 64.0 + 1e-6) {
      return "length law violated at precision " + std::to_string(precision);
    }
    for (size_t k = symbols.size(); k-- > 0;) {
      auto [next, s] = Pop(std::move(state), d);
      if (s != symbols[k]) return "scalar pop returned a different symbol";
      state = std::move(next);
    }
    if (state.head != kHeadLowerBound || !state.stream.empty()) {
      return "scalar round trip did not restore the empty state";
    }
  }
  return "";
}

std::string VectorSuite(Rng& rng) {
  for (int trial = 0; trial < 20; ++trial) {
    const size_t lanes = 1 + rng.Below(100);
    const unsigned precision = 1 + static_cast<unsigned>(rng.Below(24));
    std::vector<QuantizedDistribution> dists;
    for (size_t i = 0; i < lanes; ++i) {
      dists.push_back(RandomDistribution(rng, precision));
    }
    ShapedMessage msg(HeadShape::Flat(lanes));
    std::vector<std::vector<uint32_t>> pushed;
    for (int round = 0; round < 8; ++round) {
      std::vector<uint32_t> symbols(lanes);
      for (size_t i = 0; i < lanes; ++i) {
        symbols[i] = static_cast<uint32_t>(rng.Below(dists[i].size()));
      }
      VPushInPlace(msg, msg.all_lanes(), symbols, dists);
      pushed.push_back(symbols);
    }
    const ShapedMessage before_flatten = msg;
    const std::vector<uint32_t> words = Flatten(msg);
    msg = Unflatten(words, HeadShape::Flat(lanes));
    if (msg != before_flatten) return "unflatten(flatten(m)) != m";
    for (size_t round = pushed.size(); round-- > 0;) {
      if (VPopInPlace(msg, msg.all_lanes(), dists) != pushed[round]) {
        return "vector pop returned different symbols";
      }
    }
    if (msg != ShapedMessage(HeadShape::Flat(lanes))) {
      return "vector round trip did not restore the empty state";
    }
  }
  ShapedMessage msg(HeadShape::Flat(64));
  const ShapedMessage original = msg;
  msg = ReshapeHead(ReshapeHead(std::move(msg), HeadShape::Flat(1)),
                    HeadShape::Flat(64));
  if (msg != original) return "shrink then grow changed the message";
  return "";
}

std::string SimdSuite(Rng& rng) {
  if (!detail::SimdKernelsAvailable()) return "";
  const QuantizedDistribution d = RandomDistribution(rng, 16);
  std::vector<uint32_t> symbols(1000);
  for (uint32_t& s : symbols) s = static_cast<uint32_t>(rng.Below(d.size()));
  auto run = [&](bool simd) {
    detail::SetSimdKernelsEnabled(simd);
    ShapedMessage msg(HeadShape::Flat(symbols.size()));
    for (int round = 0; round < 4; ++round) {
      VPushInPlace(msg, msg.all_lanes(), symbols, std::span(&d, 1));
    }
    return msg;
  };
  const ShapedMessage fast = run(true);
  const ShapedMessage portable = run(false);
  detail::SetSimdKernelsEnabled(true);
  return fast == portable ? "" : "SIMD and portable kernels disagree";
}

std::string CodecSuite(Rng& rng) {
  for (uint32_t n : {1u, 2u, 3u, 255u, 256u, 1000u, 1u << 24}) {
    const SymbolCodec codec = UniformCodec(n);
    ShapedMessage msg(HeadShape::Flat(16));
    Symbols values(16);
    for (uint32_t& v : values) v = static_cast<uint32_t>(rng.Below(n));
    msg = codec.Push(std::move(msg), values);
    auto [back, got] = codec.Pop(std::move(msg));
    if (got != values || back != ShapedMessage(HeadShape::Flat(16))) {
      return "uniform codec over " + std::to_string(n) + " failed";
    }
  }
  return "";
}

std::string DiscretizationSuite(Rng& rng) {
  for (Family family : {Family::kGaussian, Family::kLogistic}) {
    for (size_t n_bins : {2u, 16u, 4096u}) {
      for (int trial = 0; trial < 5; ++trial) {
        const double loc = 4.0 * rng.Normal();
        const double scale = std::exp(rng.Normal());
        const DiscretizationGrid grid =
            AffineGrid(StandardGrid(family, n_bins), loc, scale);
        for (size_t k = 0; k < n_bins; ++k) {
          const double mass =
              StdIntervalMass(family, (grid.edges[k] - loc) / scale,
                              (grid.edges[k + 1] - loc) / scale);
          if (std::abs(mass - 1.0 / static_cast<double>(n_bins)) > 1e-6) {
            return "bin mass deviates by more than 1e-6";
          }
        }
      }
    }
  }
  return "";
}

std::string BbansSuite(Rng& rng) {
  const BbansConfig config;
  for (const std::string& name : ModelNames()) {
    const auto model = BuildToyModel(name);
    const Shape3 shape{4, 4, 1};
    const Image x = SampleImage(*model, shape, rng);
    const HeadShape head = BbansHeadShape(*model, shape);
    const std::vector<uint32_t> seed =
        RandomSeedWords(2 + WorstCaseGrowWords(1, head.lane_count()) +
                            LatentDims(*model, shape),
                        rng);
    ShapedMessage msg = Unflatten(seed, head);
    const ShapedMessage initial = msg;
    BbansPush(msg, x, *model, config);
    if (BbansPop(msg, shape, *model, config) != x) {
      return name + ": decoded image differs";
    }
    if (msg != initial) return name + ": pop did not restore the message";
  }
  return "";
}

std::string DatasetSuite(Rng& rng) {
  const auto model = BuildToyModel("toy2");
  std::vector<Image> images;
  for (Shape3 s : {Shape3{5, 7, 1}, Shape3{8, 8, 3}, Shape3{1, 1, 1},
                   Shape3{12, 3, 2}}) {
    images.push_back(SampleImage(*model, s, rng));
  }
  ArchiveOptions options;
  options.model_id = model->id();
  options.seed = rng.NextU64();
  options.plan = PatchPlan::Parse("fallback = 1\nstage = 4 count 1\nstage = full\n");
  const Archive archive = CompressArchive(images, options);
  if (DecompressArchive(archive.bytes) != images) {
    return "archive round trip differs";
  }
  double total = 0.0;
  for (const ReportRow& row : RateReport(archive)) total += row.bits;
  if (std::abs(total - 8.0 * static_cast<double>(archive.bytes.size())) > 1e-6) {
    return "rate report does not sum to the file size";
  }
  std::vector<uint8_t> corrupt = archive.bytes;
  corrupt[kContainerHeaderBytes] ^= 1;
  try {
    DecompressArchive(corrupt);
    return "corrupted payload was accepted";
  } catch (const ContainerError&) {
  }
  return "";
}

std::string Hex(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

}  // namespace

const std::map<std::string, uint32_t>& ExpectedModelDigests() {
  static const std::map<std::string, uint32_t> digests = {
      {"toy1", 0x08a6f7ec},
      {"toy2", 0x93205446},
      {"toy3", 0x8c0175b7},
      {"linear-gaussian", 0xc2042616},
  };
  return digests;
}

std::map<std::string, uint32_t> ParseDigestFile(const std::string& text) {
  std::map<std::string, uint32_t> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string name;
    std::string value;
    if (!(fields >> name)) continue;
    if (name[0] == '#') continue;
    std::string extra;
    if (!(fields >> value) || (fields >> extra)) {
      throw std::invalid_argument("digest line must be '<model> <hex>': " + line);
    }
    size_t used = 0;
    unsigned long parsed = 0;
    try {
      parsed = std::stoul(value, &used, 16);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || parsed > 0xffffffffUL) {
      throw std::invalid_argument("bad digest '" + value + "'");
    }
    out[name] = static_cast<uint32_t>(parsed);
  }
  return out;
}

bool SelftestReport::passed() const {
  for (const SelftestCheck& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::string SelftestReport::ToString() const {
  std::ostringstream out;
  size_t failed = 0;
  for (const SelftestCheck& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << ": "
        << c.detail << '\n';
    failed += !c.passed;
  }
  out << checks.size() - failed << '/' << checks.size() << " checks passed\n";
  return out.str();
}

SelftestReport RunSelftest(const SelftestOptions& options) {
  SelftestReport report;
  Runner runner(report);
  Rng rng(options.seed);

  std::map<std::string, uint32_t> expected = ExpectedModelDigests();
  for (const auto& [name, digest] : options.digest_overrides) {
    expected[name] = digest;
  }
  for (const std::string& name : ModelNames()) {
    runner.Check("models", "digest_" + name, [&]() -> std::string {
      const uint32_t actual = BuildToyModel(name)->digest();
      const auto it = expected.find(name);
      if (it == expected.end()) return "no expected digest";
      if (it->second != actual) {
        return "digest " + Hex(actual) + " != expected " + Hex(it->second);
      }
      return "";
    });
  }

  // Each suite draws from its own generator so that one suite's draws do not
  // shift another's.
  auto suite = [&](const std::string& module, const std::string& name,
                   std::string (*body)(Rng&)) {
    Rng local(rng.NextU64());
    runner.Check(module, name, [&] { return body(local); });
  };
  suite("ans_core", "inverse_and_length_laws", AnsSuite);
  suite("vector_ans", "inverse_flatten_reshape", VectorSuite);
  suite("vector_ans", "simd_matches_portable", SimdSuite);
  suite("codec_layer", "uniform_round_trip", CodecSuite);
  suite("discretization", "equal_mass", DiscretizationSuite);
  suite("bbans_codec", "push_pop_inverse", BbansSuite);
  suite("image_codec", "archive_round_trip", DatasetSuite);
  return report;
}

}  // namespace hllc
