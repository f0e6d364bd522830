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


#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <filesystem>
#include <random>
#include <sstream>

#include "sparity/error.hpp"
#include "sparity/io.hpp"

namespace sparity {
namespace {

namespace fs = std::filesystem;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("sparity_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

SweepResult SmallSweep() {
  SweepGrid grid;
  grid.n = {8};
  grid.k = {2};
  grid.m = {std::nullopt, 32};
  grid.r = {6};
  grid.schemes = {InitScheme::SparseExperiment(2)};
  grid.trials = 3;
  grid.base_seed = 5;
  grid.config.steps = 400;
  grid.config.test_size = 300;
  return run_sweep(grid, 1);
}

RunManifest Manifest() {
  RunManifest m;
  m.subcommand = "sweep";
  m.config = {{"n", 8}, {"k", 2}};
  m.seed = 5;
  m.outputs = {"out/results.csv"};
  return m;
}

// Only the CSV columns survive a results file.
RunRecord CsvView(RunRecord rec) {
  rec.final_train_err = 0.5;
  rec.train_success_step.reset();
  rec.trajectory.clear();
  return rec;
}

TEST(ConfigTest, MinimalSweepGetsDefaults) {
  const SweepGrid grid = ParseConfigText("n = 50\nk = 3\nr = 100\n");
  EXPECT_EQ(grid.config.eta.W, 0.1);
  EXPECT_EQ(grid.config.eta.beta, 0.1);
  EXPECT_EQ(grid.config.lambda.u, 0.01);
  EXPECT_EQ(grid.config.batch_size, 32);
  EXPECT_EQ(grid.config.steps, 100000);
  EXPECT_EQ(grid.config.loss, Loss::kHinge);
  EXPECT_EQ(grid.trials, 50);
  EXPECT_EQ(grid.n, std::vector<int>{50});
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 50\nk = 3\n"); }), ErrorCode::kConfig);
  ASSERT_EQ(grid.schemes.size(), 1u);
  EXPECT_EQ(grid.schemes.front().variant, InitVariant::kUniformDense);
}

TEST(ConfigTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 50\nk = 3\nr = 10\neta = -0.1"); }),
            ErrorCode::kConfig);
  EXPECT_NE(MessageOf([] { ParseConfigText("n = 50\nk = 3\nr = 10\neta = -0.1"); }).find("'eta'"),
            std::string::npos);
  const std::string unknown = MessageOf([] { ParseConfigText("n = 50\nk = 3\nr = 10\nwidht = 10"); });
  EXPECT_NE(unknown.find("widht"), std::string::npos);
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 50\nk = 3\nr = 10\nwidht = 10"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("k = 3\nr = 10"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 5\nk = 6\nr = 4"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 5\nk = 2\nscheme = oversparse\nr = 4"); }),
            ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 5\nk = 2\nloss = l1\nr = 4"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("{\"n\": 5, "); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseConfigText("n = 5\nn = 6\nk = 1\nr = 4"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { parse_config("/nonexistent/sweep.conf"); }), ErrorCode::kIo);
}

TEST(ConfigTest, KeyValueDocument) {
  const Json doc = ParseDocument(
      "# comment line\n"
      "n = [50, 100]   # trailing comment\n"
      "m = [\"online\", 100]\n"
      "scheme = oversparse\n"
      "s = 2\n"
      "decay_coupled = false\n"
      "lambda = {\"W\": 0.02, \"b\": 0, \"u\": 0.01, \"beta\": 0}\n");
  EXPECT_EQ(doc["n"], Json::array({50, 100}));
  EXPECT_EQ(doc["scheme"], "oversparse");
  EXPECT_EQ(doc["decay_coupled"], false);
  EXPECT_EQ(doc["lambda"]["W"], 0.02);
  EXPECT_EQ(ParseDocument("{\"n\": 3}"), Json({{"n", 3}}));
  EXPECT_EQ(CodeOf([] { ParseDocument("just words"); }), ErrorCode::kConfig);
}

TEST(ConfigTest, AxesAndSchemes) {
  const SweepGrid grid = ParseConfigText(
      "n = [50, 100]\nk = 3\nm = [\"online\", 100, null]\nwidth = [10, 30]\n"
      "schemes = [{\"variant\": \"uniform\"}, {\"variant\": \"oversparse\", \"s\": 2}]\n"
      "trials = 10\nseed = 7\n");
  EXPECT_EQ(grid.m.size(), 3u);
  EXPECT_FALSE(grid.m[0].has_value());
  EXPECT_EQ(grid.m[1], 100);
  EXPECT_FALSE(grid.m[2].has_value());
  EXPECT_EQ(grid.r, (std::vector<int>{10, 30}));
  ASSERT_EQ(grid.schemes.size(), 2u);
  EXPECT_EQ(grid.schemes[1].variant, InitVariant::kOverSparse);
  EXPECT_EQ(grid.schemes[1].s, 2);
  EXPECT_EQ(grid.trials, 10);
  EXPECT_EQ(grid.base_seed, 7u);
}

TEST(ConfigTest, CanonicalFormRoundTrips) {
  const SweepGrid grid = ParseConfigText(
      "n = 20\nk = 2\nm = [\"online\", 64]\nr = 8\nscheme = undersparse\ns = 2\n"
      "eps_init = 0.02\neta = {\"W\": 0.2, \"b\": 0.1, \"u\": 0.05, \"beta\": 0}\n"
      "gamma = 0.001\nsteps = 500\nloss = square\ntrials = 4\n");
  const Json canonical = ConfigToJson(grid);
  const SweepGrid again = ParseConfigJson(canonical);
  EXPECT_EQ(ConfigToJson(again), canonical);
  EXPECT_EQ(again.schemes.front().eps_init, 0.02);
  EXPECT_EQ(again.config.eta.u, 0.05);
  EXPECT_EQ(again.config.loss, Loss::kSquare);
}

TEST(ResultsCsvTest, EmptySweepIsHeaderOnly) {
  std::ostringstream out;
  WriteResultsCsv(out, {}, Manifest());
  std::istringstream lines(out.str());
  std::string first;
  std::string second;
  std::string rest;
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(first.rfind("# manifest {", 0), 0u);
  EXPECT_EQ(second, "n,k,m,r,scheme,s,trial,seed,success,steps_to_success,final_test_err,diverged");
  EXPECT_FALSE(std::getline(lines, rest));
  std::istringstream in(out.str());
  const ResultsFile file = ReadResultsCsv(in);
  EXPECT_TRUE(file.records.empty());
  EXPECT_EQ(file.manifest, Manifest());
}

TEST(ResultsCsvTest, RoundTrip) {
  const SweepResult res = SmallSweep();
  std::ostringstream out;
  WriteResultsCsv(out, res.records, Manifest());
  std::istringstream in(out.str());
  ResultsFile file = ReadResultsCsv(in);
  ASSERT_EQ(file.records.size(), res.records.size());
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    EXPECT_EQ(file.records[i], CsvView(res.records[i]));
  }
  EXPECT_EQ(AggregateCells(file.records), res.cells);
  EXPECT_NE(out.str().find(",online,"), std::string::npos);
}

TEST(ResultsCsvTest, Rejects) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_EQ(CodeOf([&] { ReadResultsCsv(bad_header); }), ErrorCode::kIo);
  std::istringstream short_row(std::string(kResultsHeader) + "\n1,2,3\n");
  EXPECT_EQ(CodeOf([&] { ReadResultsCsv(short_row); }), ErrorCode::kIo);
}

TEST(JsonTest, SweepResultRoundTrips) {
  const SweepResult res = SmallSweep();
  EXPECT_EQ(SweepResultFromJson(ToJson(res)), res);
  EXPECT_EQ(SweepResultFromJson(Json::parse(ToJson(res).dump())), res);
  for (const RunRecord& rec : res.records) EXPECT_EQ(RunRecordFromJson(ToJson(rec)), rec);
  EXPECT_EQ(RunManifest::FromJson(Manifest().ToJson()), Manifest());
  for (const InitScheme& scheme :
       {InitScheme::UniformDense(), InitScheme::OverSparseTheory(3, 4),
        InitScheme::UnderSparseTheory(2, 4, 0.05)}) {
    const InitScheme back = SchemeFromJson(SchemeToJson(scheme));
    EXPECT_EQ(SchemeToJson(back), SchemeToJson(scheme));
  }
}

TEST(FormatRealTest, RoundTrips) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(gen) * std::ldexp(1.0, static_cast<int>(gen() % 200) - 100);
    EXPECT_EQ(std::strtod(FormatReal(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(FormatReal(0.1), "0.10000000000000001");
}

TEST(EmitTest, BothFormatsCarryTheManifest) {
  const SweepResult res = SmallSweep();
  const fs::path dir = TempDir("emit");
  const fs::path csv = emit_results(res, OutputFormat::kCsv, dir, Manifest());
  EXPECT_EQ(csv, dir / "results.csv");
  const std::string text = ReadTextFile(csv);
  EXPECT_EQ(text.rfind("# manifest {", 0), 0u);
  std::istringstream in(text);
  const ResultsFile file = ReadResultsCsv(in);
  EXPECT_EQ(file.manifest.subcommand, "sweep");
  EXPECT_EQ(file.manifest.version, std::string(kArtifactVersion));
  EXPECT_NE(std::find(file.manifest.outputs.begin(), file.manifest.outputs.end(), csv.string()),
            file.manifest.outputs.end());

  const fs::path json = emit_results(res, OutputFormat::kJson, dir, Manifest());
  const Json doc = Json::parse(ReadTextFile(json));
  EXPECT_EQ(doc["manifest"]["subcommand"], "sweep");
  EXPECT_EQ(SweepResultFromJson(doc), res);
  fs::remove_all(dir);
}

TEST(EmitTest, IoFailuresNameThePath) {
  const fs::path dir = TempDir("blocked");
  fs::create_directories(dir);
  WriteTextFile(dir / "file", "x");
  const fs::path target = dir / "file" / "sub";
  const std::string msg =
      MessageOf([&] { emit_results(SweepResult{}, OutputFormat::kCsv, target, Manifest()); });
  EXPECT_NE(msg.find(target.string()), std::string::npos);
  EXPECT_EQ(CodeOf([&] { ReadTextFile(dir / "missing"); }), ErrorCode::kIo);
  EXPECT_EQ(CodeOf([&] { ParseOutputFormat("xml"); }), ErrorCode::kConfig);
  fs::remove_all(dir);
}

TEST(TracesCsvTest, Header) {
  const SweepResult res = SmallSweep();
  std::ostringstream out;
  WriteTracesCsv(out, res.records, Manifest());
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("# manifest ", 0), 0u);
  std::getline(lines, line);
  EXPECT_EQ(line, "scheme,trial,step,train_err,test_err");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  std::size_t snapshots = 0;
  for (const RunRecord& rec : res.records) snapshots += rec.trajectory.size();
  EXPECT_EQ(rows, snapshots);
}

}  // namespace
}  // namespace sparity
