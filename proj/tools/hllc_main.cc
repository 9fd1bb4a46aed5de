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

// hllc: compress PGM/PPM images into an archive, decompress them, benchmark
// the coder and run the self-test.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hllc/bench.h"
#include "hllc/container.h"
#include "hllc/discretization.h"
#include "hllc/image.h"
#include "hllc/selftest.h"
#include "hllc/toy_models.h"

namespace {

std::vector<uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string ReadText(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFile(path);
  return {bytes.begin(), bytes.end()};
}

void WriteFile(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

// A model name ("toy2") or its numeric id ("2").
uint8_t ResolveModel(const std::string& spec) {
  if (!spec.empty() &&
      spec.find_first_not_of("0123456789") == std::string::npos) {
    const int id = std::stoi(spec);
    if (id < 0 || id > 255) throw std::invalid_argument("bad model id " + spec);
    return hllc::ModelById(static_cast<uint8_t>(id))->id();
  }
  return hllc::BuildToyModel(spec)->id();
}

std::vector<size_t> ParseLanes(const std::string& text) {
  std::vector<size_t> lanes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size() || v == 0) {
      throw std::invalid_argument("bad lane count '" + item + "'");
    }
    lanes.push_back(static_cast<size_t>(v));
  }
  return lanes;
}

struct CompressArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string model = "toy2";
  unsigned precision = hllc::kDefaultPrecision;
  unsigned bins_log2 = hllc::kDefaultBinsLog2;
  std::string plan;
  uint64_t seed = 0;
  std::string report;
};

int Compress(const CompressArgs& args) {
  std::vector<hllc::Image> images;
  for (const std::string& path : args.inputs) {
    images.push_back(hllc::DecodePnm(ReadFile(path)));
  }
  hllc::ArchiveOptions options;
  options.model_id = ResolveModel(args.model);
  options.config.precision = args.precision;
  options.config.bins_log2 = args.bins_log2;
  options.config.Validate();
  if (!args.plan.empty()) {
    options.plan = hllc::PatchPlan::Parse(ReadText(args.plan));
  }
  options.plan.Validate();
  options.seed = args.seed;

  const hllc::Archive archive = hllc::CompressArchive(images, options);
  WriteFile(args.output, archive.bytes);

  std::cout << "wrote " << args.output << ": " << images.size()
            << " image(s), " << archive.bytes.size() << " bytes\n";
  for (const hllc::StageReport& stage : archive.result.stages) {
    if (stage.images == 0 && stage.units == 0) continue;
    std::cout << "  " << std::left << std::setw(10) << stage.label
              << " images " << stage.images << "  content "
              << std::setprecision(4) << std::fixed << stage.bits_per_dim()
              << " bits/dim\n";
  }
  const std::vector<hllc::ReportRow> rows = hllc::RateReport(archive);
  if (!args.report.empty()) {
    std::ofstream out(args.report);
    out << hllc::ReportCsv(rows);
    if (!out) throw std::runtime_error("cannot write " + args.report);
  }
  return 0;
}

int Decompress(const std::string& input, const std::string& out_dir,
               const std::string& prefix) {
  const std::vector<hllc::Image> images =
      hllc::DecompressArchive(ReadFile(input));
  std::filesystem::create_directories(out_dir);
  for (size_t k = 0; k < images.size(); ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "%s%04zu.%s", prefix.c_str(), k,
                  images[k].shape.c == 1 ? "pgm" : "ppm");
    const std::string path = (std::filesystem::path(out_dir) / name).string();
    WriteFile(path, hllc::EncodePnm(images[k]));
    std::cout << path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bits-back image compression with hierarchical latent models"};
  app.require_subcommand(1);

  CompressArgs cargs;
  CLI::App* compress = app.add_subcommand("compress", "Compress PGM/PPM files");
  compress->add_option("inputs", cargs.inputs, "Input images (P5/P6)");
  compress->add_option("-o,--output", cargs.output, "Archive path")->required();
  compress->add_option("--model", cargs.model,
                       "toy1, toy2, toy3, linear-gaussian, or a model id");
  compress->add_option("--precision", cargs.precision,
                       "Likelihood precision in bits")
      ->check(CLI::Range(8, 24));
  compress->add_option("--bins-log2", cargs.bins_log2,
                       "log2 of the latent bin count")
      ->check(CLI::Range(1, 16));
  compress->add_option("--plan", cargs.plan, "Patch plan file");
  compress->add_option("--seed", cargs.seed, "Seed for initial random words");
  compress->add_option("--report", cargs.report, "Write the rate report CSV");

  std::string archive_path;
  std::string out_dir = ".";
  std::string prefix = "image_";
  CLI::App* decompress =
      app.add_subcommand("decompress", "Restore the images of an archive");
  decompress->add_option("archive", archive_path, "Archive path")->required();
  decompress->add_option("-o,--output-dir", out_dir, "Output directory");
  decompress->add_option("--prefix", prefix, "Output file name prefix");

  hllc::BenchConfig bench_config;
  std::string lanes_text = "1,16,256,4096,65536";
  std::string bench_csv;
  CLI::App* bench =
      app.add_subcommand("bench", "Scalar vs lane-parallel throughput (CSV)");
  bench->add_option("--lanes", lanes_text, "Comma-separated lane counts");
  bench->add_option("--symbols", bench_config.symbols,
                    "Symbols per measurement");
  bench->add_option("--precision", bench_config.precision, "Coder precision")
      ->check(CLI::Range(8, 24));
  bench->add_option("--repeats", bench_config.repeats, "Best of N runs")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_config.seed, "Symbol seed");
  bench->add_option("--report", bench_csv, "Also write the CSV here");

  hllc::SelftestOptions selftest_options;
  std::string digest_file;
  CLI::App* selftest = app.add_subcommand("selftest", "Run invariant suites");
  selftest->add_option("--seed", selftest_options.seed, "Suite seed");
  selftest->add_option("--digests", digest_file,
                       "Expected model digests, '<model> <hex>' per line");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compress) return Compress(cargs);
    if (*decompress) return Decompress(archive_path, out_dir, prefix);
    if (*bench) {
      bench_config.lanes = ParseLanes(lanes_text);
      bench_config.threads = hllc::BenchThreadsFromEnv();
      const std::vector<hllc::BenchRow> rows = hllc::RunBench(bench_config);
      hllc::WriteBenchCsv(std::cout, rows);
      if (!bench_csv.empty()) {
        std::ofstream out(bench_csv);
        hllc::WriteBenchCsv(out, rows);
        if (!out) throw std::runtime_error("cannot write " + bench_csv);
      }
      return 0;
    }
    if (*selftest) {
      if (!digest_file.empty()) {
        selftest_options.digest_overrides =
            hllc::ParseDigestFile(ReadText(digest_file));
      }
      const hllc::SelftestReport report = hllc::RunSelftest(selftest_options);
      std::cout << report.ToString();
      return report.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "hllc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
