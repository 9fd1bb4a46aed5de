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

// Throughput of the scalar coder against the lane-parallel one.

#ifndef HLLC_BENCH_H_
#define HLLC_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

namespace hllc {

struct BenchConfig {
  std::vector<size_t> lanes = {1, 16, 256, 4096, 65536};
  // Symbols coded per measurement (rounded up to whole lane vectors).
  size_t symbols = size_t{1} << 22;
  unsigned precision = 16;
  uint32_t alphabet = 256;
  // Best of this many timed runs.
  int repeats = 3;
  size_t threads = 1;
  uint64_t seed = 1;
};

struct BenchRow {
  size_t lanes = 0;
  size_t threads = 0;
  size_t symbols = 0;  // per thread
  double scalar_encode = 0.0;  // symbols per second, all threads
  double scalar_decode = 0.0;
  double vector_encode = 0.0;
  double vector_decode = 0.0;

  // Push followed by pop of the same symbols: n / (t_encode + t_decode).
  double scalar_roundtrip() const { return Harmonic(scalar_encode, scalar_decode); }
  double vector_roundtrip() const { return Harmonic(vector_encode, vector_decode); }

  double encode_speedup() const { return vector_encode / scalar_encode; }
  double decode_speedup() const { return vector_decode / scalar_decode; }
  double roundtrip_speedup() const {
    return vector_roundtrip() / scalar_roundtrip();
  }

 private:
  static double Harmonic(double a, double b) { return 1.0 / (1.0 / a + 1.0 / b); }
};

// HLLC_THREADS if set and positive, else 1, capped by the hardware.
size_t BenchThreadsFromEnv();

// Throws std::runtime_error if a decode disagrees with its encode.
std::vector<BenchRow> RunBench(const BenchConfig& config);

void WriteBenchCsv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace hllc

#endif  // HLLC_BENCH_H_
