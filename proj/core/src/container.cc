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

#include "hllc/container.h"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <sstream>

#include "hllc/toy_models.h"

namespace hllc {
namespace {

constexpr uint8_t kMagic[4] = {'H', 'L', 'L', 'C'};

void PutLe(std::vector<uint8_t>& out, uint64_t v, int bytes) {
  for (int k = 0; k < bytes; ++k) out.push_back(static_cast<uint8_t>(v >> (8 * k)));
}

uint64_t GetLe(std::span<const uint8_t> in, size_t pos, int bytes) {
  uint64_t v = 0;
  for (int k = 0; k < bytes; ++k) v |= uint64_t{in[pos + k]} << (8 * k);
  return v;
}

}  // namespace

uint32_t Crc32(std::span<const uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large buffers in pieces.
  constexpr size_t kChunk = size_t{1} << 30;
  for (size_t pos = 0; pos < bytes.size(); pos += kChunk) {
    const size_t n = std::min(kChunk, bytes.size() - pos);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
  }
  return static_cast<uint32_t>(crc);
}

std::vector<uint8_t> WriteContainer(const ContainerHeader& header,
                                    std::span<const uint32_t> words) {
  std::vector<uint8_t> out(kMagic, kMagic + 4);
  out.push_back(header.version);
  out.push_back(header.model_id);
  out.push_back(header.precision);
  out.push_back(header.bins_log2);
  PutLe(out, header.image_count, 4);
  PutLe(out, words.size(), 8);
  const size_t payload_start = out.size();
  out.reserve(out.size() + 4 * words.size() + kContainerTrailerBytes);
  for (uint32_t w : words) PutLe(out, w, 4);
  const uint32_t crc = Crc32(std::span(out).subspan(payload_start));
  PutLe(out, crc, 4);
  return out;
}

ParsedContainer ReadContainer(std::span<const uint8_t> bytes) {
  if (bytes.size() < kContainerHeaderBytes + kContainerTrailerBytes) {
    throw ContainerError("archive is too short");
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ContainerError("bad magic: not an HLLC archive");
  }
  ParsedContainer parsed;
  ContainerHeader& h = parsed.header;
  h.version = bytes[4];
  if (h.version != kContainerVersion) {
    throw ContainerError("unsupported archive version " +
                         std::to_string(h.version));
  }
  h.model_id = bytes[5];
  h.precision = bytes[6];
  h.bins_log2 = bytes[7];
  h.image_count = static_cast<uint32_t>(GetLe(bytes, 8, 4));
  const uint64_t word_count = GetLe(bytes, 12, 8);
  const uint64_t payload_bytes =
      bytes.size() - kContainerHeaderBytes - kContainerTrailerBytes;
  if (word_count > payload_bytes / 4 || word_count * 4 != payload_bytes) {
    throw ContainerError("archive length does not match its word count");
  }
  const auto payload = bytes.subspan(kContainerHeaderBytes, payload_bytes);
  const uint32_t stored = static_cast<uint32_t>(
      GetLe(bytes, kContainerHeaderBytes + payload_bytes, 4));
  if (Crc32(payload) != stored) {
    throw ContainerError("payload CRC mismatch: archive is corrupt");
  }
  parsed.words.resize(word_count);
  for (size_t k = 0; k < word_count; ++k) {
    parsed.words[k] = static_cast<uint32_t>(GetLe(payload, 4 * k, 4));
  }
  return parsed;
}

Archive CompressArchive(std::span<const Image> images,
                        const ArchiveOptions& options) {
  const auto model = ModelById(options.model_id);
  Archive archive;
  archive.result = CompressDataset(images, *model, options.config,
                                   options.plan, options.seed);
  ContainerHeader header;
  header.model_id = options.model_id;
  header.precision = static_cast<uint8_t>(options.config.precision);
  header.bins_log2 = static_cast<uint8_t>(options.config.bins_log2);
  header.image_count = static_cast<uint32_t>(images.size());
  archive.bytes = WriteContainer(header, archive.result.words);
  return archive;
}

std::vector<Image> DecompressArchive(std::span<const uint8_t> bytes) {
  const ParsedContainer parsed = ReadContainer(bytes);
  const auto model = ModelById(parsed.header.model_id);
  BbansConfig config;
  config.precision = parsed.header.precision;
  config.bins_log2 = parsed.header.bins_log2;
  return DecompressDataset(parsed.words, parsed.header.image_count, *model,
                           config);
}

std::vector<ReportRow> RateReport(const Archive& archive) {
  std::vector<ReportRow> rows;
  rows.push_back({"container", "header_and_crc",
                  8.0 * (kContainerHeaderBytes + kContainerTrailerBytes), 0.0});
  double accounted = rows.back().bits;
  for (const StageReport& s : archive.result.stages) {
    if (s.images == 0) continue;
    rows.push_back({s.label, "content", s.content_bits, s.dims});
    rows.push_back({s.label, "side_info", s.side_bits, 0.0});
    rows.push_back({s.label, "seed", s.seed_bits, 0.0});
    accounted += s.content_bits + s.side_bits + s.seed_bits;
  }
  // Head register, flatten folding and renormalization slack.
  const double total = 8.0 * static_cast<double>(archive.bytes.size());
  rows.push_back({"message", "residual", total - accounted, 0.0});
  return rows;
}

std::string ReportCsv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "stage,field,bits,dims,bits_per_dim\n";
  out.precision(10);
  for (const ReportRow& r : rows) {
    out << r.stage << "," << r.field << "," << r.bits << "," << r.dims << ","
        << (r.dims > 0 ? r.bits / r.dims : 0.0) << "\n";
  }
  return out.str();
}

}  // namespace hllc
