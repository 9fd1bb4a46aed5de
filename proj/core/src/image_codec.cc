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

#include "hllc/image_codec.h"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "hllc/random.h"

namespace hllc {
namespace {

constexpr LaneSpan kLane0{0, 1};

// One flag on lane 0 whose rare value costs 12 bits and whose common value
// costs about 0.00035 bits.
constexpr unsigned kFlagPrecision = 12;
constexpr LaneCode kCommon{0, (1u << kFlagPrecision) - 1};
constexpr LaneCode kRare{(1u << kFlagPrecision) - 1, 1};

void PushFlag(ShapedMessage& msg, bool rare) {
  const LaneCode code = rare ? kRare : kCommon;
  PushLanes(msg, kLane0, std::span(&code, 1), kFlagPrecision);
}

bool PopFlag(ShapedMessage& msg) {
  uint32_t slot = 0;
  PeekSlots(msg, kLane0, kFlagPrecision, std::span(&slot, 1));
  const bool rare = slot >= kRare.start;
  const LaneCode code = rare ? kRare : kCommon;
  PopLanes(msg, kLane0, std::span(&code, 1), kFlagPrecision);
  return rare;
}

void PushUniform(ShapedMessage& msg, uint32_t n, uint32_t value) {
  UniformCodec(n).push(msg, kLane0, Symbols{value});
}

uint32_t PopUniform(ShapedMessage& msg, uint32_t n) {
  return UniformCodec(n).pop(msg, kLane0)[0];
}

void RequireOneLane(const ShapedMessage& msg) {
  if (msg.lane_count() != 1) {
    throw AnsError("image codec expects a one-lane message, got " +
                   std::to_string(msg.lane_count()) + " lanes");
  }
}

enum class Kind : uint8_t { kFallback = 0, kFull = 1, kPatch = 2, kNone = 3 };

struct Mode {
  Kind kind = Kind::kNone;
  uint32_t side = 0;
  friend bool operator==(const Mode&, const Mode&) = default;
};

// Each image's mode is coded against the mode of the image after it, which
// the decoder (running backwards) already knows.
void PushMode(ShapedMessage& msg, Mode mode, Mode reference) {
  if (mode == reference) {
    PushFlag(msg, false);
    return;
  }
  if (mode.kind == Kind::kPatch) {
    PushUniform(msg, static_cast<uint32_t>(kMaxImageSide), mode.side - 1);
  }
  PushUniform(msg, 3, static_cast<uint32_t>(mode.kind));
  PushFlag(msg, true);
}

Mode PopMode(ShapedMessage& msg, Mode reference) {
  if (!PopFlag(msg)) return reference;
  Mode mode;
  mode.kind = static_cast<Kind>(PopUniform(msg, 3));
  if (mode.kind == Kind::kPatch) {
    mode.side = PopUniform(msg, static_cast<uint32_t>(kMaxImageSide)) + 1;
  }
  return mode;
}

std::vector<PatchRect> UnitsOf(Mode mode, Shape3 shape) {
  if (mode.kind == Kind::kPatch) return PatchLayout(shape, mode.side);
  return {PatchRect{0, 0, shape}};
}

std::string StageLabel(const PatchStage& stage) {
  return stage.side == 0 ? "full" : "patch" + std::to_string(stage.side);
}

}  // namespace

void CheckImageShape(Shape3 shape) {
  if (shape.h < 1 || shape.w < 1 || shape.c < 1 || shape.h > kMaxImageSide ||
      shape.w > kMaxImageSide || shape.c > kMaxImageChannelsInHeader) {
    throw std::invalid_argument(
        "image shape " + std::to_string(shape.h) + "x" +
        std::to_string(shape.w) + "x" + std::to_string(shape.c) +
        " outside [1, 65536] x [1, 65536] x [1, 4]");
  }
}

void PushShape(ShapedMessage& msg, Shape3 shape) {
  CheckImageShape(shape);
  PushUniform(msg, kMaxImageSide, static_cast<uint32_t>(shape.h - 1));
  PushUniform(msg, kMaxImageSide, static_cast<uint32_t>(shape.w - 1));
  PushUniform(msg, kMaxImageChannelsInHeader, static_cast<uint32_t>(shape.c - 1));
}

Shape3 PopShape(ShapedMessage& msg) {
  Shape3 shape;
  shape.c = PopUniform(msg, kMaxImageChannelsInHeader) + 1;
  shape.w = PopUniform(msg, kMaxImageSide) + 1;
  shape.h = PopUniform(msg, kMaxImageSide) + 1;
  return shape;
}

size_t UnitDemandWords(const LatentHierarchyModel& model, Shape3 shape) {
  return WorstCaseGrowWords(1, BbansHeadShape(model, shape).lane_count()) +
         LatentDims(model, shape);
}

void EncodeUnit(ShapedMessage& msg, const Image& x,
                const LatentHierarchyModel& model, const BbansConfig& config) {
  RequireOneLane(msg);
  msg = ReshapeHead(std::move(msg), BbansHeadShape(model, x.shape));
  BbansPush(msg, x, model, config);
  msg = ReshapeHead(std::move(msg), HeadShape::Flat(1));
}

Image DecodeUnit(ShapedMessage& msg, Shape3 shape,
                 const LatentHierarchyModel& model, const BbansConfig& config) {
  RequireOneLane(msg);
  msg = ReshapeHead(std::move(msg), BbansHeadShape(model, shape));
  Image x = BbansPop(msg, shape, model, config);
  msg = ReshapeHead(std::move(msg), HeadShape::Flat(1));
  return x;
}

void EncodeImageVariable(ShapedMessage& msg, const Image& x,
                         const LatentHierarchyModel& model,
                         const BbansConfig& config) {
  CheckImageShape(x.shape);
  EncodeUnit(msg, x, model, config);
  PushShape(msg, x.shape);
}

Image DecodeImageVariable(ShapedMessage& msg, const LatentHierarchyModel& model,
                          const BbansConfig& config) {
  RequireOneLane(msg);
  const Shape3 shape = PopShape(msg);
  return DecodeUnit(msg, shape, model, config);
}

Codec<std::vector<uint32_t>> FallbackByteCodec(size_t n_bytes,
                                               unsigned precision) {
  using Counts = std::vector<uint32_t>;
  std::function<Counts(Counts, const uint32_t&)> update =
      [](Counts counts, const uint32_t& v) {
        if (v >= counts.size()) throw AnsError("fallback symbol is not a byte");
        ++counts[v];
        return counts;
      };
  std::function<Codec<uint32_t>(const Counts&)> step =
      [precision](const Counts& counts) {
        std::vector<double> pmf(counts.begin(), counts.end());
        return ScalarOf(CategoricalCodec({Quantize(pmf, precision)}));
      };
  return AutoregressiveCompose<uint32_t, Counts>(
      Counts(256, 1), update, step, ForwardOrder(n_bytes));
}

void PatchPlan::Validate() const {
  if (stages.empty() || stages.back().side != 0) {
    throw std::invalid_argument("patch plan must end with a full-image stage");
  }
  size_t previous = 0;
  for (size_t k = 0; k + 1 < stages.size(); ++k) {
    const PatchStage& s = stages[k];
    if (s.side == 0) {
      throw std::invalid_argument("full-image stage must be the last stage");
    }
    if (s.side > kMaxImageSide) {
      throw std::invalid_argument("patch side exceeds 65536");
    }
    if (s.side < previous) {
      throw std::invalid_argument("patch sides must be nondecreasing");
    }
    previous = s.side;
  }
}

PatchPlan PatchPlan::FullOnly() {
  PatchPlan plan;
  plan.stages.push_back({});
  return plan;
}

PatchPlan PatchPlan::Parse(const std::string& text) {
  PatchPlan plan;
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    line = line.substr(0, line.find('#'));
    const size_t eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("plan line " + std::to_string(line_no) +
                                  ": " + why);
    };
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::istringstream value(trim(line.substr(eq + 1)));
    if (key == "fallback") {
      if (!(value >> plan.fallback_images)) fail("fallback needs a count");
    } else if (key == "seed") {
      std::string mode;
      value >> mode;
      if (mode == "counted") {
        plan.counted_seed = true;
      } else if (mode == "error") {
        plan.counted_seed = false;
      } else {
        fail("seed must be 'counted' or 'error'");
      }
    } else if (key == "stage") {
      std::string first;
      value >> first;
      PatchStage stage;
      if (first != "full") {
        const char* end = first.data() + first.size();
        const auto [ptr, ec] = std::from_chars(first.data(), end, stage.side);
        if (ec != std::errc() || ptr != end) {
          fail("stage needs 'full' or a patch side");
        }
        if (stage.side == 0) fail("patch side must be positive");
        std::string limit;
        while (value >> limit) {
          size_t n = 0;
          if (!(value >> n) || n == 0) {
            fail("stage limit needs a positive number");
          }
          if (limit == "count" && stage.count == 0) {
            stage.count = n;
          } else if (limit == "until" && stage.until_words == 0) {
            stage.until_words = n;
          } else {
            fail("stage limit must be 'count' or 'until', each at most once");
          }
        }
      } else {
        std::string extra;
        if (value >> extra) fail("a full-image stage takes no limit");
      }
      plan.stages.push_back(stage);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  plan.Validate();
  return plan;
}

std::string PatchPlan::ToString() const {
  std::ostringstream out;
  out << "fallback = " << fallback_images << "\n";
  out << "seed = " << (counted_seed ? "counted" : "error") << "\n";
  for (const PatchStage& s : stages) {
    out << "stage = ";
    if (s.side == 0) {
      out << "full";
    } else {
      out << s.side;
      if (s.count) out << " count " << s.count;
      if (s.until_words) out << " until " << s.until_words;
    }
    out << "\n";
  }
  return out.str();
}

DatasetResult CompressDataset(std::span<const Image> images,
                              const LatentHierarchyModel& model,
                              const BbansConfig& config, const PatchPlan& plan,
                              uint64_t seed) {
  plan.Validate();
  config.Validate();
  Rng rng(seed);
  DatasetResult result;
  result.stages.emplace_back().label = "fallback";
  for (const PatchStage& s : plan.stages) {
    result.stages.emplace_back().label = StageLabel(s);
  }

  ShapedMessage msg(HeadShape::Flat(1));
  size_t stage = 0;  // into plan.stages
  size_t in_stage = 0;
  Mode previous;
  for (size_t k = 0; k < images.size(); ++k) {
    const Image& x = images[k];
    CheckImageShape(x.shape);
    Mode mode;
    size_t report_index = 0;
    if (k < plan.fallback_images) {
      mode = {Kind::kFallback, 0};
    } else {
      while (stage + 1 < plan.stages.size()) {
        const PatchStage& s = plan.stages[stage];
        const bool by_count = s.count > 0 && in_stage >= s.count;
        const bool by_buffer =
            s.until_words > 0 && msg.stream().size() >= s.until_words;
        if (!by_count && !by_buffer) break;
        ++stage;
        in_stage = 0;
      }
      const PatchStage& s = plan.stages[stage];
      mode = s.side == 0 ? Mode{Kind::kFull, 0}
                         : Mode{Kind::kPatch, static_cast<uint32_t>(s.side)};
      report_index = stage + 1;
      ++in_stage;
    }
    StageReport& report = result.stages[report_index];
    result.image_stage.push_back(report_index);

    double mark = msg.InformationBits();
    if (k > 0) {
      PushMode(msg, previous, mode);
      report.side_bits += msg.InformationBits() - mark;
    }
    double content = 0.0;
    if (mode.kind == Kind::kFallback) {
      mark = msg.InformationBits();
      std::vector<uint32_t> bytes(x.data.begin(), x.data.end());
      FallbackByteCodec(bytes.size(), config.precision).push(msg, kLane0, bytes);
      content += msg.InformationBits() - mark;
      ++report.units;
    } else {
      for (const PatchRect& rect : UnitsOf(mode, x.shape)) {
        const size_t demand = UnitDemandWords(model, rect.shape);
        const size_t have = msg.stream().size();
        size_t seeded = 0;
        if (have < demand) {
          if (!plan.counted_seed) {
            throw InsufficientBitsError(demand - have);
          }
          seeded = demand - have;
          const std::vector<uint32_t> words = RandomSeedWords(seeded, rng);
          msg.mutable_stream().insert(msg.mutable_stream().end(),
                                      words.begin(), words.end());
          report.seed_bits += 32.0 * seeded;
        }
        mark = msg.InformationBits();
        msg.ResetStreamLowWater();
        EncodeUnit(msg, CropImage(x, rect), model, config);
        content += msg.InformationBits() - mark;
        if (seeded > 0) {
          // Drop the seed words the unit never read.
          const size_t low = msg.stream_low_water();
          const size_t unread = low > have ? std::min(low, have + seeded) - have : 0;
          auto& stream = msg.mutable_stream();
          stream.erase(stream.begin() + have, stream.begin() + have + unread);
          seeded -= unread;
          report.seed_bits -= 32.0 * unread;
        }
        mark = msg.InformationBits();
        if (seeded > 0) {
          PushUniform(msg, 1u << 16, static_cast<uint32_t>(seeded & 0xffff));
          PushUniform(msg, 1u << 16, static_cast<uint32_t>(seeded >> 16));
        }
        PushFlag(msg, seeded > 0);
        report.side_bits += msg.InformationBits() - mark;
        ++report.units;
      }
    }
    mark = msg.InformationBits();
    PushShape(msg, x.shape);
    report.side_bits += msg.InformationBits() - mark;
    report.content_bits += content;
    report.dims += static_cast<double>(x.shape.size());
    report.image_bits_per_dim.push_back(content /
                                        static_cast<double>(x.shape.size()));
    ++report.images;
    previous = mode;
  }
  if (!images.empty()) {
    const double mark = msg.InformationBits();
    PushMode(msg, previous, Mode{});
    result.stages[result.image_stage.back()].side_bits +=
        msg.InformationBits() - mark;
  }
  result.words = Flatten(std::move(msg));
  return result;
}

std::vector<Image> DecompressDataset(std::span<const uint32_t> words,
                                     size_t count,
                                     const LatentHierarchyModel& model,
                                     const BbansConfig& config) {
  config.Validate();
  ShapedMessage msg = Unflatten(words, HeadShape::Flat(1));
  std::vector<Image> images(count);
  Mode mode;
  if (count > 0) mode = PopMode(msg, Mode{});
  for (size_t k = count; k-- > 0;) {
    if (mode.kind == Kind::kNone) throw AnsError("corrupt image mode");
    const Shape3 shape = PopShape(msg);
    Image x(shape);
    if (mode.kind == Kind::kFallback) {
      const std::vector<uint32_t> bytes =
          FallbackByteCodec(shape.size(), config.precision).pop(msg, kLane0);
      std::copy(bytes.begin(), bytes.end(), x.data.begin());
    } else {
      const std::vector<PatchRect> units = UnitsOf(mode, shape);
      for (size_t u = units.size(); u-- > 0;) {
        size_t seeded = 0;
        if (PopFlag(msg)) {
          const size_t high = PopUniform(msg, 1u << 16);
          const size_t low = PopUniform(msg, 1u << 16);
          seeded = (high << 16) | low;
        }
        const Image patch = DecodeUnit(msg, units[u].shape, model, config);
        PasteImage(x, patch, units[u].y, units[u].x);
        if (seeded > msg.stream().size()) {
          throw AnsError("corrupt archive: seed count exceeds the stream");
        }
        msg.mutable_stream().resize(msg.stream().size() - seeded);
      }
    }
    images[k] = std::move(x);
    if (k > 0) mode = PopMode(msg, mode);
  }
  if (!(msg.head()[0] == kHeadLowerBound && msg.stream().empty())) {
    throw AnsError("archive has data left over after the last image");
  }
  return images;
}

}  // namespace hllc
