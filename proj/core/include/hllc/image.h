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

// Binary PGM/PPM input and output, and row-major patch tiling.

#ifndef HLLC_IMAGE_H_
#define HLLC_IMAGE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hllc/model.h"

namespace hllc {

class ImageFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// P5 (1 channel) or P6 (3 channels) with maxval 255.
Image DecodePnm(std::span<const uint8_t> bytes);
// Canonical header "P5\n<w> <h>\n255\n" (or P6); other channel counts throw.
std::vector<uint8_t> EncodePnm(const Image& image);
Image ReadPnmFile(const std::string& path);
void WritePnmFile(const std::string& path, const Image& image);

struct PatchRect {
  size_t y = 0;
  size_t x = 0;
  Shape3 shape;
  friend bool operator==(const PatchRect&, const PatchRect&) = default;
};

// Row-major tiling by side x side; the last row and column keep whatever is
// left over.
std::vector<PatchRect> PatchLayout(Shape3 image, size_t side);

struct Patch {
  PatchRect rect;
  Image image;
};
std::vector<Patch> PartitionIntoPatches(const Image& image, size_t side);
Image CropImage(const Image& image, const PatchRect& rect);
void PasteImage(Image& into, const Image& patch, size_t y, size_t x);
Image Reassemble(std::span<const Patch> patches, Shape3 shape);

}  // namespace hllc

#endif  // HLLC_IMAGE_H_
