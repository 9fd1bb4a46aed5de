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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "test_support.h"

namespace hllc {
namespace {

std::vector<uint8_t> Bytes(const std::string& s) { return {s.begin(), s.end()}; }

TEST(PnmTest, CanonicalEncoding) {
  Image x(Shape3{2, 3, 1});
  x.data = {1, 2, 3, 4, 5, 6};
  std::vector<uint8_t> want = Bytes("P5\n3 2\n255\n");
  want.insert(want.end(), x.data.begin(), x.data.end());
  EXPECT_EQ(EncodePnm(x), want);

  Image rgb(Shape3{1, 1, 3});
  rgb.data = {10, 20, 30};
  EXPECT_EQ(EncodePnm(rgb), (std::vector<uint8_t>{'P', '6', '\n', '1', ' ',
                                                  '1', '\n', '2', '5', '5',
                                                  '\n', 10, 20, 30}));
}

TEST(PnmTest, RandomImagesRoundTripByteExactly) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape3 shape{1 + rng.Below(70), 1 + rng.Below(70),
                       rng.Below(2) == 0 ? size_t{1} : size_t{3}};
    const Image x = testing::RandomNoiseImage(rng, shape);
    const std::vector<uint8_t> bytes = EncodePnm(x);
    EXPECT_EQ(DecodePnm(bytes), x);
    EXPECT_EQ(EncodePnm(DecodePnm(bytes)), bytes);
  }
}

TEST(PnmTest, AcceptsCommentsAndLooseWhitespace) {
  std::vector<uint8_t> bytes = Bytes("P5 # a comment\n\t4   1\n# another\n255 ");
  bytes.insert(bytes.end(), {9, '\n', 11, 12});
  const Image x = DecodePnm(bytes);
  EXPECT_EQ(x.shape, (Shape3{1, 4, 1}));
  EXPECT_EQ(x.data, (std::vector<uint8_t>{9, '\n', 11, 12}));
}

TEST(PnmTest, RejectsMalformedInput) {
  const std::vector<std::string> bad = {
      "",          "P",          "P3\n1 1\n255\n0", "P7\n1 1\n255\n0",
      "P5\n",      "P5\n1\n",    "P5\n0 1\n255\n",  "P5\n1 1\n65535\n00",
      "P5\n1 1\n255\n", "P5\n2 2\n255\n123", "P5\nx 1\n255\n0",
      "P5\n1 1\n255", "P5\n1234567890 1\n255\n0"};
  for (const std::string& s : bad) {
    EXPECT_THROW(DecodePnm(Bytes(s)), ImageFormatError) << s;
  }
  EXPECT_THROW(EncodePnm(Image(Shape3{1, 1, 2})), ImageFormatError);
  EXPECT_THROW(EncodePnm(Image(Shape3{1, 1, 4})), ImageFormatError);
}

TEST(PnmTest, FilesRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "hllc_image_test.ppm").string();
  Rng rng(2);
  const Image x = testing::RandomNoiseImage(rng, {5, 7, 3});
  WritePnmFile(path, x);
  EXPECT_EQ(ReadPnmFile(path), x);
  std::remove(path.c_str());
  EXPECT_THROW(ReadPnmFile((dir / "hllc_no_such_file.pgm").string()),
               ImageFormatError);
}

TEST(PatchTest, ExactTiling) {
  const std::vector<PatchRect> rects = PatchLayout({64, 64, 3}, 32);
  ASSERT_EQ(rects.size(), 4u);
  EXPECT_EQ(rects[0], (PatchRect{0, 0, {32, 32, 3}}));
  EXPECT_EQ(rects[1], (PatchRect{0, 32, {32, 32, 3}}));
  EXPECT_EQ(rects[2], (PatchRect{32, 0, {32, 32, 3}}));
  EXPECT_EQ(rects[3], (PatchRect{32, 32, {32, 32, 3}}));
}

TEST(PatchTest, RaggedEdgesKeepTheRemainder) {
  const std::vector<PatchRect> rects = PatchLayout({70, 70, 1}, 32);
  ASSERT_EQ(rects.size(), 9u);
  EXPECT_EQ(rects[2], (PatchRect{0, 64, {32, 6, 1}}));
  EXPECT_EQ(rects[6], (PatchRect{64, 0, {6, 32, 1}}));
  EXPECT_EQ(rects[8], (PatchRect{64, 64, {6, 6, 1}}));
  EXPECT_EQ(PatchLayout({5, 3, 1}, 32),
            (std::vector<PatchRect>{{0, 0, {5, 3, 1}}}));
  EXPECT_THROW(PatchLayout({5, 5, 1}, 0), std::invalid_argument);
}

TEST(PatchTest, LayoutCoversEveryPixelOnce) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape3 shape{1 + rng.Below(80), 1 + rng.Below(80), 1 + rng.Below(3)};
    const size_t side = 1 + rng.Below(40);
    std::vector<int> hits(shape.h * shape.w, 0);
    const std::vector<PatchRect> rects = PatchLayout(shape, side);
    const size_t rows = (shape.h + side - 1) / side;
    const size_t cols = (shape.w + side - 1) / side;
    ASSERT_EQ(rects.size(), rows * cols);
    for (size_t k = 0; k < rects.size(); ++k) {
      const PatchRect& r = rects[k];
      EXPECT_EQ(r.y, k / cols * side);
      EXPECT_EQ(r.x, k % cols * side);
      EXPECT_EQ(r.shape.c, shape.c);
      for (size_t i = 0; i < r.shape.h; ++i) {
        for (size_t j = 0; j < r.shape.w; ++j) {
          ++hits[(r.y + i) * shape.w + r.x + j];
        }
      }
    }
    for (int h : hits) ASSERT_EQ(h, 1);
  }
}

TEST(PatchTest, PartitionThenReassembleIsIdentity) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Shape3 shape{1 + rng.Below(50), 1 + rng.Below(50), 1 + rng.Below(4)};
    const Image x = testing::RandomNoiseImage(rng, shape);
    const std::vector<Patch> patches = PartitionIntoPatches(x, 1 + rng.Below(20));
    for (const Patch& p : patches) {
      for (size_t i = 0; i < p.rect.shape.h; ++i) {
        for (size_t j = 0; j < p.rect.shape.w; ++j) {
          for (size_t c = 0; c < shape.c; ++c) {
            ASSERT_EQ(p.image.at(i, j, c), x.at(p.rect.y + i, p.rect.x + j, c));
          }
        }
      }
    }
    EXPECT_EQ(Reassemble(patches, shape), x);
  }
}

TEST(PatchTest, OutOfBoundsRectanglesAreRejected) {
  Image x(Shape3{4, 4, 1});
  EXPECT_THROW(CropImage(x, {2, 0, {3, 1, 1}}), std::invalid_argument);
  EXPECT_THROW(CropImage(x, {0, 0, {1, 1, 3}}), std::invalid_argument);
  EXPECT_THROW(PasteImage(x, Image(Shape3{2, 2, 1}), 3, 0), std::invalid_argument);
  EXPECT_THROW(PasteImage(x, Image(Shape3{1, 1, 3}), 0, 0), std::invalid_argument);
}

}  // namespace
}  // namespace hllc
