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

// Archive container:
//
//   "HLLC" | version u8 | model id u8 | precision u8 | bins log2 u8 |
//   image count u32 | payload word count u64 | payload words u32... |
//   CRC32 of the payload bytes u32
//
// All integers little-endian. The payload is a flattened one-lane message.

#ifndef HLLC_CONTAINER_H_
#define HLLC_CONTAINER_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hllc/bbans.h"
#include "hllc/image_codec.h"
#include "hllc/model.h"

namespace hllc {

inline constexpr uint8_t kContainerVersion = 1;
inline constexpr size_t kContainerHeaderBytes = 20;
inline constexpr size_t kContainerTrailerBytes = 4;

class ContainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContainerHeader {
  uint8_t version = kContainerVersion;
  uint8_t model_id = 0;
  uint8_t precision = kDefaultPrecision;
  uint8_t bins_log2 = 12;
  uint32_t image_count = 0;
  friend bool operator==(const ContainerHeader&,
                         const ContainerHeader&) = default;
};

uint32_t Crc32(std::span<const uint8_t> bytes);

std::vector<uint8_t> WriteContainer(const ContainerHeader& header,
                                    std::span<const uint32_t> words);

struct ParsedContainer {
  ContainerHeader header;
  std::vector<uint32_t> words;
};
// Checks magic, version, length and CRC before returning anything.
ParsedContainer ReadContainer(std::span<const uint8_t> bytes);

struct ArchiveOptions {
  uint8_t model_id = 1;
  BbansConfig config;
  PatchPlan plan = PatchPlan::FullOnly();
  uint64_t seed = 0;
};

struct Archive {
  std::vector<uint8_t> bytes;
  DatasetResult result;
};

Archive CompressArchive(std::span<const Image> images,
                        const ArchiveOptions& options);
std::vector<Image> DecompressArchive(std::span<const uint8_t> bytes);

struct ReportRow {
  std::string stage;
  std::string field;
  double bits;
  double dims;
};
// Per-stage rows plus container and residual rows; the bits column sums to
// 8 * bytes.size().
std::vector<ReportRow> RateReport(const Archive& archive);
std::string ReportCsv(std::span<const ReportRow> rows);

}  // namespace hllc

#endif  // HLLC_CONTAINER_H_
