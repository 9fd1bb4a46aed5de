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

// Variable-size image coding on a one-lane message, and the dataset chain
// with its patch schedule.
//
// One BB-ANS unit (an image or a patch) is coded as
//   grow to the unit's head shape; BbansPush; shrink back to one lane
// so the coder has one lane before and after every unit. A whole image is
// followed by its shape under uniform codecs.

#ifndef HLLC_IMAGE_CODEC_H_
#define HLLC_IMAGE_CODEC_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hllc/bbans.h"
#include "hllc/codec.h"
#include "hllc/image.h"
#include "hllc/model.h"
#include "hllc/vector_ans.h"

namespace hllc {

inline constexpr size_t kMaxImageSide = size_t{1} << 16;
inline constexpr size_t kMaxImageChannelsInHeader = 4;

void CheckImageShape(Shape3 shape);

// Shape as three uniform symbols on lane 0: h - 1 and w - 1 over 2^16, then
// c - 1 over 4.
void PushShape(ShapedMessage& msg, Shape3 shape);
Shape3 PopShape(ShapedMessage& msg);

// Stream words a unit of this shape can consume before it pushes anything:
// the worst-case grow from one lane plus one word per posterior pop.
size_t UnitDemandWords(const LatentHierarchyModel& model, Shape3 shape);

// Grow, push, shrink; `msg` has one lane before and after.
void EncodeUnit(ShapedMessage& msg, const Image& x,
                const LatentHierarchyModel& model, const BbansConfig& config);
Image DecodeUnit(ShapedMessage& msg, Shape3 shape,
                 const LatentHierarchyModel& model, const BbansConfig& config);

// Unit followed by the shape.
void EncodeImageVariable(ShapedMessage& msg, const Image& x,
                         const LatentHierarchyModel& model,
                         const BbansConfig& config);
Image DecodeImageVariable(ShapedMessage& msg, const LatentHierarchyModel& model,
                          const BbansConfig& config);

// Order-0 adaptive model over byte values: every count starts at 1 and the
// table is requantized after each byte.
Codec<std::vector<uint32_t>> FallbackByteCodec(size_t n_bytes,
                                               unsigned precision);

struct PatchStage {
  size_t side = 0;  // 0: full images
  // The stage ends after `count` images, or once the stream holds
  // `until_words` words; with neither it runs to the end.
  size_t count = 0;
  size_t until_words = 0;
};

struct PatchPlan {
  size_t fallback_images = 0;
  std::vector<PatchStage> stages;  // last one has side 0
  // Without counted seeding a unit that lacks buffer is an error.
  bool counted_seed = true;

  // Throws std::invalid_argument if sides decrease or the last stage is not
  // full images.
  void Validate() const;
  static PatchPlan FullOnly();
  // Lines of "key = value": fallback = N; seed = counted | error;
  // stage = full | <side> [count N | until W]. '#' starts a comment.
  static PatchPlan Parse(const std::string& text);
  std::string ToString() const;
};

struct StageReport {
  std::string label;
  size_t images = 0;
  size_t units = 0;
  double dims = 0.0;
  double content_bits = 0.0;  // BB-ANS units or fallback bytes
  double side_bits = 0.0;     // shapes, mode descriptors, unit flags
  double seed_bits = 0.0;     // counted random words
  std::vector<double> image_bits_per_dim;  // content only, per image

  double bits_per_dim() const { return dims > 0 ? content_bits / dims : 0.0; }
};

struct DatasetResult {
  std::vector<uint32_t> words;  // flattened one-lane message
  std::vector<StageReport> stages;
  std::vector<size_t> image_stage;  // stage index per image
};

DatasetResult CompressDataset(std::span<const Image> images,
                              const LatentHierarchyModel& model,
                              const BbansConfig& config, const PatchPlan& plan,
                              uint64_t seed);
// Throws AnsError if words remain once every image is decoded.
std::vector<Image> DecompressDataset(std::span<const uint32_t> words,
                                     size_t count,
                                     const LatentHierarchyModel& model,
                                     const BbansConfig& config);

}  // namespace hllc

#endif  // HLLC_IMAGE_CODEC_H_
