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

#include "hllc/image.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>

namespace hllc {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  size_t Number() {
    SkipSpaceAndComments();
    size_t value = 0;
    size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) throw ImageFormatError("PNM header number too large");
    }
    if (digits == 0) throw ImageFormatError("malformed PNM header");
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw ImageFormatError("malformed PNM header");
    }
    return pos_ + 1;
  }

  size_t pos_ = 0;

 private:
  std::span<const uint8_t> bytes_;
};

}  // namespace

Image DecodePnm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ImageFormatError("not a binary PGM (P5) or PPM (P6) file");
  }
  const size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes);
  reader.pos_ = 2;
  const size_t w = reader.Number();
  const size_t h = reader.Number();
  const size_t maxval = reader.Number();
  if (w == 0 || h == 0) throw ImageFormatError("PNM image has zero size");
  if (maxval != 255) throw ImageFormatError("only 8-bit PNM (maxval 255) is supported");
  const size_t start = reader.RasterStart();
  Image image({h, w, channels});
  if (bytes.size() - start < image.data.size()) {
    throw ImageFormatError("PNM raster is truncated");
  }
  std::copy_n(bytes.begin() + start, image.data.size(), image.data.begin());
  return image;
}

std::vector<uint8_t> EncodePnm(const Image& image) {
  if (image.shape.c != 1 && image.shape.c != 3) {
    throw ImageFormatError("PNM output needs 1 or 3 channels, got " +
                           std::to_string(image.shape.c));
  }
  const std::string header = std::string(image.shape.c == 1 ? "P5" : "P6") +
                             "\n" + std::to_string(image.shape.w) + " " +
                             std::to_string(image.shape.h) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.data.begin(), image.data.end());
  return out;
}

Image ReadPnmFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageFormatError("cannot open '" + path + "'");
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return DecodePnm(bytes);
}

void WritePnmFile(const std::string& path, const Image& image) {
  const std::vector<uint8_t> bytes = EncodePnm(image);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageFormatError("cannot write '" + path + "'");
}

std::vector<PatchRect> PatchLayout(Shape3 image, size_t side) {
  if (side == 0) throw std::invalid_argument("patch side must be positive");
  std::vector<PatchRect> rects;
  for (size_t y = 0; y < image.h; y += side) {
    for (size_t x = 0; x < image.w; x += side) {
      rects.push_back({y, x,
                       {std::min(side, image.h - y), std::min(side, image.w - x),
                        image.c}});
    }
  }
  return rects;
}

Image CropImage(const Image& image, const PatchRect& rect) {
  if (rect.shape.c != image.shape.c || rect.y + rect.shape.h > image.shape.h ||
      rect.x + rect.shape.w > image.shape.w) {
    throw std::invalid_argument("crop rectangle lies outside the image");
  }
  Image out(rect.shape);
  const size_t row = rect.shape.w * rect.shape.c;
  for (size_t i = 0; i < rect.shape.h; ++i) {
    const auto* src = &image.data[((rect.y + i) * image.shape.w + rect.x) *
                                  image.shape.c];
    std::copy_n(src, row, &out.data[i * row]);
  }
  return out;
}

void PasteImage(Image& into, const Image& patch, size_t y, size_t x) {
  if (patch.shape.c != into.shape.c || y + patch.shape.h > into.shape.h ||
      x + patch.shape.w > into.shape.w) {
    throw std::invalid_argument("patch does not fit at its position");
  }
  const size_t row = patch.shape.w * patch.shape.c;
  for (size_t i = 0; i < patch.shape.h; ++i) {
    std::copy_n(&patch.data[i * row], row,
                &into.data[((y + i) * into.shape.w + x) * into.shape.c]);
  }
}

std::vector<Patch> PartitionIntoPatches(const Image& image, size_t side) {
  std::vector<Patch> patches;
  for (const PatchRect& rect : PatchLayout(image.shape, side)) {
    patches.push_back({rect, CropImage(image, rect)});
  }
  return patches;
}

Image Reassemble(std::span<const Patch> patches, Shape3 shape) {
  Image out(shape);
  for (const Patch& p : patches) PasteImage(out, p.image, p.rect.y, p.rect.x);
  return out;
}

}  // namespace hllc
