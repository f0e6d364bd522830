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


#include "sparity/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sparity/error.hpp"

namespace sparity {
namespace {

constexpr std::string_view kManifestPrefix = "# manifest ";
constexpr std::string_view kTraceHeader = "scheme,trial,step,train_err,test_err";

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string Shortest(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Json SizeToJson(const std::optional<long>& m) {
  return m ? Json(*m) : Json("online");
}

std::optional<long> SizeFromJson(const Json& v, std::string_view field) {
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "online")) {
    return std::nullopt;
  }
  if (v.is_number_integer() && v.get<long>() >= 1) return v.get<long>();
  Fail(ErrorCode::kConfig, "config field '" + std::string(field) +
                               "': sizes must be positive integers or "
                               "\"online\"");
}

template <typename T>
Json OptionalJson(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> OptionalFrom(const Json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

Json LayerToJson(const LayerValues& v) {
  return {{"W", v.W}, {"b", v.b}, {"u", v.u}, {"beta", v.beta}};
}

LayerValues ReadLayer(ConfigReader& reader, std::string_view key,
                      const LayerValues& fallback) {
  if (!reader.Has(key)) return fallback;
  const Json& raw = reader.Raw(key);
  if (raw.is_object()) {
    ConfigReader sub(raw, std::string(key) + ".");
    LayerValues v;
    v.W = sub.Real("W", fallback.W, 0.0);
    v.b = sub.Real("b", fallback.b, 0.0);
    v.u = sub.Real("u", fallback.u, 0.0);
    v.beta = sub.Real("beta", fallback.beta, 0.0);
    sub.Finish();
    return v;
  }
  return LayerValues::All(reader.Real(key, 0.0, 0.0));
}

// Rethrows validation failures as configuration errors.
template <typename F>
void AsConfigError(F&& check) {
  try {
    check();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, std::string("invalid config: ") + e.what());
  }
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
T ParseInteger(std::string_view text, std::string_view column) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    Fail(ErrorCode::kIo, "bad value '" + std::string(text) + "' in column " +
                             std::string(column));
  }
  return value;
}

double ParseReal(std::string_view text, std::string_view column) {
  const std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    Fail(ErrorCode::kIo,
         "bad value '" + s + "' in column " + std::string(column));
  }
  return v;
}

bool ParseFlag(std::string_view text, std::string_view column) {
  const int v = ParseInteger<int>(text, column);
  if (v != 0 && v != 1) {
    Fail(ErrorCode::kIo, "column " + std::string(column) + " must be 0 or 1");
  }
  return v == 1;
}

void WriteManifestLine(std::ostream& out, const RunManifest& manifest) {
  out << kManifestPrefix << manifest.ToJson().dump() << '\n';
}

}  // namespace

Json RunManifest::ToJson() const {
  return {{"subcommand", subcommand}, {"version", version}, {"seed", seed},
          {"config", config},         {"outputs", outputs}};
}

RunManifest RunManifest::FromJson(const Json& doc) {
  try {
    RunManifest m;
    m.subcommand = doc.at("subcommand").get<std::string>();
    m.version = doc.at("version").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.config = doc.at("config");
    m.outputs = doc.at("outputs").get<std::vector<std::string>>();
    return m;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed manifest: ") + e.what());
  }
}

ConfigReader::ConfigReader(const Json& doc, std::string context)
    : doc_(doc), context_(std::move(context)) {
  if (!doc_.is_object()) {
    Fail(ErrorCode::kConfig,
         context_.empty() ? "config must be an object"
                          : "config field '" +
                                context_.substr(0, context_.size() - 1) +
                                "': expected an object");
  }
}

bool ConfigReader::Has(std::string_view key) const {
  return doc_.contains(std::string(key));
}

const Json& ConfigReader::Lookup(std::string_view key) {
  used_.emplace_back(key);
  return doc_.at(std::string(key));
}

const Json& ConfigReader::Raw(std::string_view key) { return Lookup(key); }

void ConfigReader::FailField(std::string_view key,
                             const std::string& what) const {
  Fail(ErrorCode::kConfig,
       "config field '" + context_ + std::string(key) + "': " + what);
}

long ConfigReader::Int(std::string_view key, long fallback, long min_value) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  long value = 0;
  if (v.is_number_integer()) {
    value = v.get<long>();
  } else if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() &&
             std::abs(v.get<double>()) < 9e18) {
    value = static_cast<long>(v.get<double>());
  } else {
    FailField(key, "must be an integer");
  }
  if (value < min_value) {
    FailField(key, min_value == 0 ? "must be nonnegative"
                                  : "must be at least " + std::to_string(min_value));
  }
  return value;
}

double ConfigReader::Real(std::string_view key, double fallback,
                          double min_value) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  if (!v.is_number()) FailField(key, "must be a number");
  const double value = v.get<double>();
  if (!std::isfinite(value)) FailField(key, "must be finite");
  if (value < min_value) {
    FailField(key, min_value == 0.0 ? "must be nonnegative"
                                    : "must be at least " + Shortest(min_value));
  }
  return value;
}

bool ConfigReader::Bool(std::string_view key, bool fallback) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  if (!v.is_boolean()) FailField(key, "must be true or false");
  return v.get<bool>();
}

std::string ConfigReader::String(std::string_view key, std::string fallback) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  if (!v.is_string()) FailField(key, "must be a string");
  return v.get<std::string>();
}

std::uint64_t ConfigReader::Seed(std::string_view key, std::uint64_t fallback) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) {
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  FailField(key, "must be a nonnegative integer");
}

std::vector<int> ConfigReader::IntList(std::string_view key,
                                       std::vector<int> fallback,
                                       int min_value) {
  if (!Has(key)) return fallback;
  const Json& v = Lookup(key);
  const Json list = v.is_array() ? v : Json::array({v});
  if (list.empty()) FailField(key, "must not be empty");
  std::vector<int> out;
  for (const Json& item : list) {
    if (!item.is_number_integer()) FailField(key, "must hold integers");
    const long value = item.get<long>();
    if (value < min_value || value > 1'000'000'000) {
      FailField(key, "values must be at least " + std::to_string(min_value));
    }
    out.push_back(static_cast<int>(value));
  }
  return out;
}

void ConfigReader::Finish() const {
  for (const auto& [key, value] : doc_.items()) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
      Fail(ErrorCode::kConfig, "unknown config key '" + context_ + key + "'");
    }
  }
}

TrainConfig ReadTrainConfig(ConfigReader& reader, TrainConfig defaults) {
  TrainConfig c = defaults;
  c.eta = ReadLayer(reader, "eta", c.eta);
  c.lambda = ReadLayer(reader, "lambda", c.lambda);
  c.gamma = reader.Real("gamma", c.gamma, 0.0);
  c.batch_size = static_cast<int>(reader.Int("batch_size", c.batch_size, 1));
  c.steps = reader.Int("steps", c.steps, 0);
  if (reader.Has("loss")) {
    const std::string name = reader.String("loss", "");
    try {
      c.loss = ParseLoss(name);
    } catch (const Error&) {
      reader.FailField("loss", "unknown loss '" + name + "'");
    }
  }
  c.decay_coupled = reader.Bool("decay_coupled", c.decay_coupled);
  c.eval_interval = static_cast<int>(reader.Int("eval_interval", c.eval_interval, 1));
  c.test_size = static_cast<int>(reader.Int("test_size", c.test_size, 1));
  c.success_threshold = reader.Real("success_threshold", c.success_threshold, 0.0);
  c.eval_early_exit = reader.Bool("eval_early_exit", c.eval_early_exit);
  c.keep_trajectory = reader.Bool("keep_trajectory", c.keep_trajectory);
  AsConfigError([&] { c.Validate(); });
  return c;
}

Json TrainConfigToJson(const TrainConfig& c) {
  return {{"eta", LayerToJson(c.eta)},
          {"lambda", LayerToJson(c.lambda)},
          {"gamma", c.gamma},
          {"batch_size", c.batch_size},
          {"steps", c.steps},
          {"loss", ToString(c.loss)},
          {"decay_coupled", c.decay_coupled},
          {"eval_interval", c.eval_interval},
          {"test_size", c.test_size},
          {"success_threshold", c.success_threshold},
          {"eval_early_exit", c.eval_early_exit},
          {"keep_trajectory", c.keep_trajectory}};
}

Json ParseDocument(std::string_view text) {
  const std::string_view body = Trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      return Json::parse(body);
    } catch (const Json::parse_error& e) {
      Fail(ErrorCode::kConfig, std::string("malformed JSON config: ") + e.what());
    }
  }
  Json doc = Json::object();
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kConfig,
           "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      Fail(ErrorCode::kConfig,
           "config line " + std::to_string(line_no) + ": empty key");
    }
    if (doc.contains(key)) {
      Fail(ErrorCode::kConfig, "config key '" + key + "' given twice");
    }
    Json parsed = Json::parse(value, nullptr, false);
    doc[key] = parsed.is_discarded() ? Json(std::string(value)) : parsed;
  }
  return doc;
}

Json SchemeToJson(const InitScheme& scheme) {
  return {{"variant", ToString(scheme.variant)},
          {"s", scheme.s},
          {"eps_init", scheme.eps_init},
          {"bias_grid", scheme.bias_grid},
          {"second_layer", scheme.second_layer == SecondLayerInit::kPlusMinusOne
                               ? "plus_minus_one"
                               : "uniform"},
          {"symmetric_pairing", scheme.symmetric_pairing}};
}

InitScheme SchemeFromJson(const Json& doc) {
  ConfigReader reader(doc, "schemes.");
  InitScheme scheme;
  const std::string variant = reader.String("variant", "uniform");
  try {
    scheme.variant = ParseInitVariant(variant);
  } catch (const Error&) {
    reader.FailField("variant", "unknown scheme '" + variant + "'");
  }
  scheme.s = static_cast<int>(reader.Int("s", 0, 0));
  scheme.eps_init = reader.Real("eps_init", 0.0, 0.0);
  if (reader.Has("bias_grid")) {
    const Json& grid = reader.Raw("bias_grid");
    if (!grid.is_array()) reader.FailField("bias_grid", "must be an array");
    for (const Json& v : grid) {
      if (!v.is_number()) reader.FailField("bias_grid", "must hold numbers");
      scheme.bias_grid.push_back(v.get<double>());
    }
  }
  const std::string second = reader.String("second_layer", "uniform");
  if (second == "plus_minus_one") {
    scheme.second_layer = SecondLayerInit::kPlusMinusOne;
  } else if (second != "uniform") {
    reader.FailField("second_layer", "expected uniform or plus_minus_one");
  }
  scheme.symmetric_pairing = reader.Bool("symmetric_pairing", false);
  reader.Finish();
  return scheme;
}

SweepGrid ParseConfigJson(const Json& doc) {
  ConfigReader reader(doc);
  SweepGrid grid;
  grid.n = reader.IntList("n", {}, 1);
  grid.k = reader.IntList("k", {}, 1);
  if (grid.n.empty()) reader.FailField("n", "is required");
  if (grid.k.empty()) reader.FailField("k", "is required");
  if (reader.Has("r") && reader.Has("width")) {
    reader.FailField("width", "conflicts with 'r'");
  }
  grid.r = reader.IntList(reader.Has("width") ? "width" : "r", {}, 1);
  if (grid.r.empty()) reader.FailField("r", "is required");
  if (reader.Has("m")) {
    const Json& m = reader.Raw("m");
    const Json list = m.is_array() ? m : Json::array({m});
    if (list.empty()) reader.FailField("m", "must not be empty");
    for (const Json& v : list) grid.m.push_back(SizeFromJson(v, "m"));
  } else {
    grid.m = {std::nullopt};
  }

  if (reader.Has("schemes")) {
    for (const char* key : {"scheme", "s", "eps_init"}) {
      if (reader.Has(key)) reader.FailField(key, "conflicts with 'schemes'");
    }
    const Json& list = reader.Raw("schemes");
    if (!list.is_array() || list.empty()) {
      reader.FailField("schemes", "must be a nonempty array");
    }
    for (const Json& item : list) grid.schemes.push_back(SchemeFromJson(item));
  } else {
    std::vector<std::string> names;
    if (reader.Has("scheme")) {
      const Json& v = reader.Raw("scheme");
      const Json list = v.is_array() ? v : Json::array({v});
      for (const Json& item : list) {
        if (!item.is_string()) reader.FailField("scheme", "must hold names");
        names.push_back(item.get<std::string>());
      }
    } else {
      names = {"uniform"};
    }
    const bool has_s = reader.Has("s");
    const std::vector<int> sparsities = reader.IntList("s", {0}, 0);
    const double eps = reader.Real("eps_init", 0.0, 0.0);
    for (const std::string& name : names) {
      InitVariant variant{};
      try {
        variant = ParseInitVariant(name);
      } catch (const Error&) {
        reader.FailField("scheme", "unknown scheme '" + name + "'");
      }
      if (variant == InitVariant::kUniformDense) {
        grid.schemes.push_back(InitScheme::UniformDense());
        continue;
      }
      if (!has_s) reader.FailField("s", "is required for sparse schemes");
      for (int s : sparsities) {
        InitScheme scheme = InitScheme::SparseExperiment(s);
        if (variant == InitVariant::kUnderSparse) {
          scheme.variant = InitVariant::kUnderSparse;
          scheme.eps_init = eps;
        }
        grid.schemes.push_back(scheme);
      }
    }
  }
  grid.trials = static_cast<int>(reader.Int("trials", grid.trials, 1));
  grid.base_seed = reader.Seed("seed", grid.base_seed);
  grid.config = ReadTrainConfig(reader);
  reader.Finish();
  AsConfigError([&] { grid.Validate(); });
  return grid;
}

SweepGrid ParseConfigText(std::string_view text) {
  return ParseConfigJson(ParseDocument(text));
}

SweepGrid parse_config(const std::filesystem::path& path) {
  return ParseConfigText(ReadTextFile(path));
}

Json ConfigToJson(const SweepGrid& grid) {
  Json doc = TrainConfigToJson(grid.config);
  doc["n"] = grid.n;
  doc["k"] = grid.k;
  Json sizes = Json::array();
  for (const auto& m : grid.m) sizes.push_back(SizeToJson(m));
  doc["m"] = sizes;
  doc["r"] = grid.r;
  Json schemes = Json::array();
  for (const auto& s : grid.schemes) schemes.push_back(SchemeToJson(s));
  doc["schemes"] = schemes;
  doc["trials"] = grid.trials;
  doc["seed"] = grid.base_seed;
  return doc;
}

Json ToJson(const RunRecord& rec) {
  Json trajectory = Json::array();
  for (const Snapshot& snap : rec.trajectory) {
    trajectory.push_back({{"step", snap.step},
                          {"train_err", snap.train_err},
                          {"test_err", snap.test_err}});
  }
  return {{"n", rec.n},
          {"k", rec.k},
          {"m", SizeToJson(rec.m)},
          {"r", rec.r},
          {"scheme", rec.scheme},
          {"s", rec.s},
          {"trial", rec.trial},
          {"seed", rec.seed},
          {"success", rec.success},
          {"steps_to_success", OptionalJson(rec.steps_to_success)},
          {"final_train_err", rec.final_train_err},
          {"final_test_err", rec.final_test_err},
          {"diverged", rec.diverged},
          {"train_success_step", OptionalJson(rec.train_success_step)},
          {"trajectory", trajectory}};
}

RunRecord RunRecordFromJson(const Json& doc) {
  try {
    RunRecord rec;
    rec.n = doc.at("n").get<int>();
    rec.k = doc.at("k").get<int>();
    rec.m = SizeFromJson(doc.at("m"), "m");
    rec.r = doc.at("r").get<int>();
    rec.scheme = doc.at("scheme").get<std::string>();
    rec.s = doc.at("s").get<int>();
    rec.trial = doc.at("trial").get<int>();
    rec.seed = doc.at("seed").get<std::uint64_t>();
    rec.success = doc.at("success").get<bool>();
    rec.steps_to_success = OptionalFrom<long>(doc.at("steps_to_success"));
    rec.final_train_err = doc.at("final_train_err").get<double>();
    rec.final_test_err = doc.at("final_test_err").get<double>();
    rec.diverged = doc.at("diverged").get<bool>();
    rec.train_success_step = OptionalFrom<long>(doc.at("train_success_step"));
    for (const Json& snap : doc.at("trajectory")) {
      rec.trajectory.push_back({snap.at("step").get<long>(),
                                snap.at("train_err").get<double>(),
                                snap.at("test_err").get<double>()});
    }
    return rec;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed run record: ") + e.what());
  }
}

Json ToJson(const CellSummary& cell) {
  return {{"n", cell.key.n},
          {"k", cell.key.k},
          {"m", SizeToJson(cell.key.m)},
          {"r", cell.key.r},
          {"scheme", cell.key.scheme},
          {"s", cell.key.s},
          {"trials", cell.trials},
          {"successes", cell.successes},
          {"success_prob", cell.success_prob},
          {"median_steps", OptionalJson(cell.median_steps)}};
}

CellSummary CellSummaryFromJson(const Json& doc) {
  try {
    CellSummary cell;
    cell.key = {doc.at("n").get<int>(),           doc.at("k").get<int>(),
                SizeFromJson(doc.at("m"), "m"),   doc.at("r").get<int>(),
                doc.at("scheme").get<std::string>(), doc.at("s").get<int>()};
    cell.trials = doc.at("trials").get<int>();
    cell.successes = doc.at("successes").get<int>();
    cell.success_prob = doc.at("success_prob").get<double>();
    cell.median_steps = OptionalFrom<double>(doc.at("median_steps"));
    return cell;
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kIo, std::string("malformed cell summary: ") + e.what());
  }
}

Json ToJson(const SweepResult& result) {
  Json cells = Json::array();
  for (const auto& cell : result.cells) cells.push_back(ToJson(cell));
  Json records = Json::array();
  for (const auto& rec : result.records) records.push_back(ToJson(rec));
  return {{"cells", cells}, {"records", records}};
}

SweepResult SweepResultFromJson(const Json& doc) {
  if (!doc.contains("cells") || !doc.contains("records")) {
    Fail(ErrorCode::kIo, "sweep result needs 'cells' and 'records'");
  }
  SweepResult result;
  for (const Json& cell : doc.at("cells")) {
    result.cells.push_back(CellSummaryFromJson(cell));
  }
  for (const Json& rec : doc.at("records")) {
    result.records.push_back(RunRecordFromJson(rec));
  }
  return result;
}

Json ToJson(const FrontierReport& report) {
  Json widths = Json::array();
  for (const WidthSlice& slice : report.width_slices) {
    widths.push_back({{"n", slice.base.n},
                      {"k", slice.base.k},
                      {"m", SizeToJson(slice.base.m)},
                      {"scheme", slice.base.scheme},
                      {"s", slice.base.s},
                      {"widths", slice.widths},
                      {"probs", slice.probs},
                      {"monotone", slice.monotone}});
  }
  Json sizes = Json::array();
  for (const SampleSlice& slice : report.sample_slices) {
    Json m = Json::array();
    for (const auto& size : slice.sizes) m.push_back(SizeToJson(size));
    sizes.push_back({{"n", slice.base.n},
                     {"k", slice.base.k},
                     {"r", slice.base.r},
                     {"scheme", slice.base.scheme},
                     {"s", slice.base.s},
                     {"sizes", m},
                     {"probs", slice.probs},
                     {"non_monotone", slice.non_monotone},
                     {"double_descent", slice.double_descent}});
  }
  return {{"width_slices", widths},
          {"sample_slices", sizes},
          {"width_monotone", report.width_monotone},
          {"any_double_descent", report.any_double_descent}};
}

Json ToJson(const LotteryResult& result) {
  Json rewound = Json::array();
  for (const auto& rec : result.rewound) rewound.push_back(ToJson(rec));
  Json random = Json::array();
  for (const auto& rec : result.random) random.push_back(ToJson(rec));
  return {{"n", result.instance.n()},
          {"support", result.instance.support()},
          {"full", ToJson(result.full)},
          {"kept", result.kept},
          {"rewound", rewound},
          {"random", random},
          {"rewound_successes", result.rewound_successes},
          {"random_successes", result.random_successes},
          {"p_value", result.p_value}};
}

std::string FormatReal(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void WriteResultsCsv(std::ostream& out, std::span<const RunRecord> records,
                     const RunManifest& manifest) {
  WriteManifestLine(out, manifest);
  out << kResultsHeader << '\n';
  for (const RunRecord& rec : records) {
    if (rec.scheme.find_first_of(",\"\n") != std::string::npos) {
      Fail(ErrorCode::kInvalidArgument,
           "scheme name '" + rec.scheme + "' cannot be written to CSV");
    }
    out << rec.n << ',' << rec.k << ',';
    if (rec.m) {
      out << *rec.m;
    } else {
      out << "online";
    }
    out << ',' << rec.r << ',' << rec.scheme << ',' << rec.s << ','
        << rec.trial << ',' << rec.seed << ',' << (rec.success ? 1 : 0) << ',';
    if (rec.steps_to_success) out << *rec.steps_to_success;
    out << ',' << FormatReal(rec.final_test_err) << ','
        << (rec.diverged ? 1 : 0) << '\n';
  }
}

ResultsFile ReadResultsCsv(std::istream& in) {
  ResultsFile file;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind(kManifestPrefix, 0) == 0) {
        Json doc = Json::parse(line.substr(kManifestPrefix.size()), nullptr, false);
        if (doc.is_discarded()) Fail(ErrorCode::kIo, "malformed manifest line");
        file.manifest = RunManifest::FromJson(doc);
      }
      continue;
    }
    if (!header_seen) {
      if (line != kResultsHeader) {
        Fail(ErrorCode::kIo, "unexpected results header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = SplitCsv(line);
    if (f.size() != 12) {
      Fail(ErrorCode::kIo, "results row has " + std::to_string(f.size()) +
                               " columns, expected 12");
    }
    RunRecord rec;
    rec.n = ParseInteger<int>(f[0], "n");
    rec.k = ParseInteger<int>(f[1], "k");
    if (f[2] != "online") rec.m = ParseInteger<long>(f[2], "m");
    rec.r = ParseInteger<int>(f[3], "r");
    rec.scheme = std::string(f[4]);
    rec.s = ParseInteger<int>(f[5], "s");
    rec.trial = ParseInteger<int>(f[6], "trial");
    rec.seed = ParseInteger<std::uint64_t>(f[7], "seed");
    rec.success = ParseFlag(f[8], "success");
    if (!f[9].empty()) rec.steps_to_success = ParseInteger<long>(f[9], "steps_to_success");
    rec.final_test_err = ParseReal(f[10], "final_test_err");
    rec.diverged = ParseFlag(f[11], "diverged");
    file.records.push_back(std::move(rec));
  }
  if (!header_seen) Fail(ErrorCode::kIo, "results file has no header");
  return file;
}

void WriteTracesCsv(std::ostream& out, std::span<const RunRecord> records,
                    const RunManifest& manifest) {
  WriteManifestLine(out, manifest);
  out << kTraceHeader << '\n';
  for (const RunRecord& rec : records) {
    for (const Snapshot& snap : rec.trajectory) {
      out << rec.scheme << ',' << rec.trial << ',' << snap.step << ','
          << FormatReal(snap.train_err) << ',' << FormatReal(snap.test_err)
          << '\n';
    }
  }
}

OutputFormat ParseOutputFormat(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  Fail(ErrorCode::kConfig, "unknown output format '" + name + "'");
}

std::filesystem::path emit_results(const SweepResult& result,
                                   OutputFormat format,
                                   const std::filesystem::path& dir,
                                   const RunManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const auto path =
      dir / (format == OutputFormat::kCsv ? "results.csv" : "results.json");
  RunManifest stamped = manifest;
  if (std::find(stamped.outputs.begin(), stamped.outputs.end(), path.string()) ==
      stamped.outputs.end()) {
    stamped.outputs.push_back(path.string());
  }
  std::ostringstream out;
  if (format == OutputFormat::kCsv) {
    WriteResultsCsv(out, result.records, stamped);
  } else {
    Json doc = ToJson(result);
    doc["manifest"] = stamped.ToJson();
    out << doc.dump(2) << '\n';
  }
  WriteTextFile(path, out.str());
  return path;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "error reading " + path.string());
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "error writing " + path.string());
}

}  // namespace sparity
