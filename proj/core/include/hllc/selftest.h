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

// Reduced-size invariant suites for every module, run from the command line
// as a post-install check. The report contains no timings, so a fixed seed
// gives an identical report.

#ifndef HLLC_SELFTEST_H_
#define HLLC_SELFTEST_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hllc {

// crc32 digests of the shipped model parameters, by model name.
const std::map<std::string, uint32_t>& ExpectedModelDigests();

// Lines of "<model name> <digest>", digest in hex with or without 0x.
// Throws std::invalid_argument on a malformed line.
std::map<std::string, uint32_t> ParseDigestFile(const std::string& text);

struct SelftestOptions {
  uint64_t seed = 1;
  // Replaces entries of ExpectedModelDigests().
  std::map<std::string, uint32_t> digest_overrides;
};

struct SelftestCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  bool passed() const;
  // One "PASS|FAIL suite.name: detail" line per check, then a summary.
  std::string ToString() const;
};

SelftestReport RunSelftest(const SelftestOptions& options = {});

}  // namespace hllc

#endif  // HLLC_SELFTEST_H_
