// Copyright 2026 The sparity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Configuration documents, result files and their manifests.

#ifndef SPARITY_IO_HPP_
#define SPARITY_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparity/harness.hpp"

namespace sparity {

using Json = nlohmann::json;

inline constexpr std::string_view kArtifactVersion = "sparity-0.1.0";

// Exact CSV header of a results file.
inline constexpr std::string_view kResultsHeader =
    "n,k,m,r,scheme,s,trial,seed,success,steps_to_success,final_test_err,"
    "diverged";

struct RunManifest {
  std::string subcommand;
  Json config = Json::object();
  std::string version{kArtifactVersion};
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  Json ToJson() const;
  static RunManifest FromJson(const Json& doc);

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

// Reads a JSON object field by field; Finish() rejects keys nobody asked
// for. Errors name the offending field.
class ConfigReader {
 public:
  explicit ConfigReader(const Json& doc, std::string context = "");

  bool Has(std::string_view key) const;
  const Json& Raw(std::string_view key);

  long Int(std::string_view key, long fallback, long min_value);
  double Real(std::string_view key, double fallback, double min_value);
  bool Bool(std::string_view key, bool fallback);
  std::string String(std::string_view key, std::string fallback);
  std::uint64_t Seed(std::string_view key, std::uint64_t fallback);
  // A scalar or an array of integers.
  std::vector<int> IntList(std::string_view key, std::vector<int> fallback,
                           int min_value);

  void Finish() const;

  [[noreturn]] void FailField(std::string_view key,
                              const std::string& what) const;

 private:
  const Json& Lookup(std::string_view key);

  const Json& doc_;
  std::string context_;
  std::vector<std::string> used_;
};

// Training fields shared by every document: eta, lambda (a number or an
// object with W, b, u, beta), gamma, batch_size, steps, loss,
// decay_coupled, eval_interval, test_size, success_threshold,
// eval_early_exit, keep_trajectory.
TrainConfig ReadTrainConfig(ConfigReader& reader,
                            TrainConfig defaults = TrainConfig{});
Json TrainConfigToJson(const TrainConfig& config);

// Accepts JSON or "key = value" lines (values in JSON syntax, bare words
// taken as strings, '#' comments).
Json ParseDocument(std::string_view text);

// Sweep document: axes n, k, m ("online" or sizes), r (or width), schemes
// given as scheme/s/eps_init shorthand or a "schemes" array of objects,
// trials, seed, plus the training fields.
SweepGrid ParseConfigJson(const Json& doc);
SweepGrid ParseConfigText(std::string_view text);
SweepGrid parse_config(const std::filesystem::path& path);

// Canonical document; ParseConfigJson inverts it.
Json ConfigToJson(const SweepGrid& grid);

Json SchemeToJson(const InitScheme& scheme);
InitScheme SchemeFromJson(const Json& doc);

Json ToJson(const RunRecord& record);
RunRecord RunRecordFromJson(const Json& doc);
Json ToJson(const CellSummary& cell);
CellSummary CellSummaryFromJson(const Json& doc);
Json ToJson(const SweepResult& result);
SweepResult SweepResultFromJson(const Json& doc);
Json ToJson(const FrontierReport& report);
Json ToJson(const LotteryResult& result);

// 17 significant digits.
std::string FormatReal(double value);

struct ResultsFile {
  RunManifest manifest;
  std::vector<RunRecord> records;  // CSV columns only
};

void WriteResultsCsv(std::ostream& out, std::span<const RunRecord> records,
                     const RunManifest& manifest);
ResultsFile ReadResultsCsv(std::istream& in);

// scheme,trial,step,train_err,test_err for every snapshot of every run.
void WriteTracesCsv(std::ostream& out, std::span<const RunRecord> records,
                    const RunManifest& manifest);

enum class OutputFormat { kCsv, kJson };

OutputFormat ParseOutputFormat(const std::string& name);

// Writes results.csv or results.json under `dir` (created if missing)
// with the manifest embedded; returns the written path.
std::filesystem::path emit_results(const SweepResult& result,
                                   OutputFormat format,
                                   const std::filesystem::path& dir,
                                   const RunManifest& manifest);

// Whole-file helpers; failures carry the path.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace sparity

#endif  // SPARITY_IO_HPP_
