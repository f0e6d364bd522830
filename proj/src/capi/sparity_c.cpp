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


#include "sparity/sparity.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "sparity/commands.hpp"
#include "sparity/error.hpp"
#include "sparity/io.hpp"

struct sp_params {
  sparity::MlpParams value;
};

struct sp_dataset {
  sparity::Dataset value;
};

struct sp_sweep {
  sparity::SweepResult value;
};

namespace {

using sparity::ErrorCode;
using sparity::Fail;
using sparity::Json;

thread_local std::string last_error;

static_assert(static_cast<int>(ErrorCode::kInvalidArgument) == SP_ERR_INVALID_ARGUMENT);
static_assert(static_cast<int>(ErrorCode::kScaleGuard) == SP_ERR_SCALE_GUARD);
static_assert(static_cast<int>(ErrorCode::kConfig) == SP_ERR_CONFIG);
static_assert(static_cast<int>(ErrorCode::kIo) == SP_ERR_IO);
static_assert(static_cast<int>(ErrorCode::kInfeasible) == SP_ERR_INFEASIBLE);
static_assert(static_cast<int>(ErrorCode::kInternal) == SP_ERR_INTERNAL);

template <typename F>
sp_status Guard(F&& body) {
  try {
    body();
    last_error.clear();
    return SP_OK;
  } catch (const sparity::Error& e) {
    last_error = e.what();
    return static_cast<sp_status>(e.code());
  } catch (const Json::exception& e) {
    last_error = e.what();
    return SP_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return SP_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    Fail(ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
  }
}

char* CopyString(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

Json ParseJson(const char* text, const char* what) {
  NotNull(text, what);
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    Fail(ErrorCode::kConfig, std::string(what) + " is not valid JSON");
  }
  return doc;
}

sparity::RunManifest ManifestFrom(const char* manifest_json) {
  if (manifest_json == nullptr) return {};
  return sparity::RunManifest::FromJson(ParseJson(manifest_json, "manifest"));
}

std::vector<sparity::RunRecord> RecordsFrom(const char* records_json) {
  const Json doc = ParseJson(records_json, "records");
  if (!doc.is_array()) Fail(ErrorCode::kInvalidArgument, "records must be a JSON array");
  std::vector<sparity::RunRecord> records;
  for (const Json& rec : doc) records.push_back(sparity::RunRecordFromJson(rec));
  return records;
}

sparity::ParityInstance InstanceFrom(int n, const int* support, size_t k) {
  NotNull(support, "support");
  return sparity::ParityInstance(n, std::vector<int>(support, support + k));
}

}  // namespace

extern "C" {

const char* sp_version(void) { return sparity::kArtifactVersion.data(); }

const char* sp_status_name(sp_status status) {
  switch (status) {
    case SP_OK: return "ok";
    case SP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SP_ERR_SCALE_GUARD: return "scale guard";
    case SP_ERR_CONFIG: return "config error";
    case SP_ERR_IO: return "io error";
    case SP_ERR_INFEASIBLE: return "infeasible";
    case SP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* sp_last_error(void) { return last_error.c_str(); }

void sp_string_free(char* text) { std::free(text); }

sp_status sp_params_init(const char* scheme_json, int width, int n,
                         uint64_t seed, sp_params** out) {
  return Guard([&] {
    NotNull(out, "out");
    const sparity::InitScheme scheme =
        sparity::SchemeFromJson(ParseJson(scheme_json, "scheme"));
    *out = new sp_params{sparity::init_params(scheme, width, n, seed)};
  });
}

sp_status sp_params_shape(const sp_params* params, int* width, int* n) {
  return Guard([&] {
    NotNull(params, "params");
    if (width) *width = params->value.width();
    if (n) *n = params->value.dim();
  });
}

sp_status sp_params_forward(const sp_params* params, const double* x,
                            size_t len, double* out) {
  return Guard([&] {
    NotNull(params, "params");
    NotNull(x, "x");
    NotNull(out, "out");
    if (len != static_cast<size_t>(params->value.dim())) {
      Fail(ErrorCode::kInvalidArgument, "input length does not match n");
    }
    *out = sparity::forward(params->value, std::span<const double>(x, len));
  });
}

sp_status sp_params_to_json(const sp_params* params, char** out) {
  return Guard([&] {
    NotNull(params, "params");
    NotNull(out, "out");
    const auto& p = params->value;
    Json W = Json::array();
    for (Eigen::Index i = 0; i < p.W.rows(); ++i) {
      W.push_back(std::vector<double>(p.W.row(i).begin(), p.W.row(i).end()));
    }
    const Json doc = {{"W", W},
                      {"b", std::vector<double>(p.b.begin(), p.b.end())},
                      {"u", std::vector<double>(p.u.begin(), p.u.end())},
                      {"beta", p.beta}};
    *out = CopyString(doc.dump());
  });
}

void sp_params_free(sp_params* params) { delete params; }

sp_status sp_dataset_generate(int n, const int* support, size_t k, size_t m,
                              uint64_t seed, sp_dataset** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new sp_dataset{
        sparity::generate_dataset(InstanceFrom(n, support, k), m, seed)};
  });
}

sp_status sp_dataset_full_cube(int n, const int* support, size_t k,
                               sp_dataset** out) {
  return Guard([&] {
    NotNull(out, "out");
    *out = new sp_dataset{sparity::FullCube(InstanceFrom(n, support, k))};
  });
}

sp_status sp_dataset_shape(const sp_dataset* data, size_t* rows, int* n) {
  return Guard([&] {
    NotNull(data, "data");
    if (rows) *rows = data->value.size();
    if (n) *n = static_cast<int>(data->value.x.cols());
  });
}

sp_status sp_dataset_row(const sp_dataset* data, size_t row, double* x,
                         double* y) {
  return Guard([&] {
    NotNull(data, "data");
    if (row >= data->value.size()) {
      Fail(ErrorCode::kInvalidArgument, "row index out of range");
    }
    const auto r = static_cast<Eigen::Index>(row);
    if (x) {
      for (Eigen::Index j = 0; j < data->value.x.cols(); ++j) x[j] = data->value.x(r, j);
    }
    if (y) *y = data->value.y(r);
  });
}

sp_status sp_params_error(const sp_params* params, const sp_dataset* data,
                          double* out) {
  return Guard([&] {
    NotNull(params, "params");
    NotNull(data, "data");
    NotNull(out, "out");
    *out = sparity::ZeroOneError(params->value, data->value);
  });
}

void sp_dataset_free(sp_dataset* data) { delete data; }

sp_status sp_sweep_run(const char* config_text, int workers, sp_sweep** out) {
  return Guard([&] {
    NotNull(config_text, "config");
    NotNull(out, "out");
    if (workers < 0) Fail(ErrorCode::kInvalidArgument, "workers must be nonnegative");
    *out = new sp_sweep{
        sparity::SweepCommand(sparity::ParseDocument(config_text), workers)};
  });
}

sp_status sp_sweep_load_csv(const char* path, sp_sweep** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    std::istringstream in(sparity::ReadTextFile(path));
    sparity::SweepResult result;
    result.records = sparity::ReadResultsCsv(in).records;
    result.cells = sparity::AggregateCells(result.records);
    *out = new sp_sweep{std::move(result)};
  });
}

sp_status sp_sweep_counts(const sp_sweep* sweep, size_t* cells,
                          size_t* records) {
  return Guard([&] {
    NotNull(sweep, "sweep");
    if (cells) *cells = sweep->value.cells.size();
    if (records) *records = sweep->value.records.size();
  });
}

sp_status sp_sweep_summary_json(const sp_sweep* sweep, char** out) {
  return Guard([&] {
    NotNull(sweep, "sweep");
    NotNull(out, "out");
    *out = CopyString(sparity::SweepSummary(sweep->value).dump());
  });
}

sp_status sp_sweep_to_json(const sp_sweep* sweep, char** out) {
  return Guard([&] {
    NotNull(sweep, "sweep");
    NotNull(out, "out");
    *out = CopyString(sparity::ToJson(sweep->value).dump());
  });
}

sp_status sp_sweep_emit(const sp_sweep* sweep, const char* format,
                        const char* dir, const char* manifest_json,
                        char** path_out) {
  return Guard([&] {
    NotNull(sweep, "sweep");
    NotNull(format, "format");
    NotNull(dir, "dir");
    const auto path = sparity::emit_results(
        sweep->value, sparity::ParseOutputFormat(format), dir,
        ManifestFrom(manifest_json));
    if (path_out) *path_out = CopyString(path.string());
  });
}

void sp_sweep_free(sp_sweep* sweep) { delete sweep; }

sp_status sp_run_command(const char* name, const char* request,
                         char** report_json) {
  return Guard([&] {
    NotNull(name, "name");
    NotNull(report_json, "report");
    const Json doc = sparity::ParseDocument(request ? request : "");
    const std::string command = name;
    Json report;
    if (command == "fourier") {
      report = sparity::FourierCommand(doc);
    } else if (command == "popgrad") {
      report = sparity::PopgradCommand(doc);
    } else if (command == "train") {
      report = sparity::TrainCommand(doc);
    } else if (command == "lottery") {
      report = sparity::LotteryCommand(doc);
    } else if (command == "sqcheck") {
      report = sparity::SqCheckCommand(doc);
    } else if (command == "theory-oversparse") {
      report = sparity::TheoryOversparseCommand(doc);
    } else if (command == "theory-undersparse") {
      report = sparity::TheoryUndersparseCommand(doc);
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
    }
    *report_json = CopyString(report.dump());
  });
}

sp_status sp_parse_document(const char* text, char** json_out) {
  return Guard([&] {
    NotNull(text, "text");
    NotNull(json_out, "out");
    *json_out = CopyString(sparity::ParseDocument(text).dump());
  });
}

sp_status sp_parse_config(const char* text, char** canonical_json) {
  return Guard([&] {
    NotNull(text, "config");
    NotNull(canonical_json, "out");
    *canonical_json =
        CopyString(sparity::ConfigToJson(sparity::ParseConfigText(text)).dump());
  });
}

sp_status sp_manifest_json(const char* subcommand, const char* config_json,
                           uint64_t seed, const char* outputs_json,
                           char** out) {
  return Guard([&] {
    NotNull(subcommand, "subcommand");
    NotNull(out, "out");
    sparity::RunManifest m;
    m.subcommand = subcommand;
    if (config_json) m.config = ParseJson(config_json, "config");
    m.seed = seed;
    if (outputs_json) {
      m.outputs = ParseJson(outputs_json, "outputs").get<std::vector<std::string>>();
    }
    *out = CopyString(m.ToJson().dump());
  });
}

sp_status sp_write_records_csv(const char* records_json,
                               const char* manifest_json, const char* path) {
  return Guard([&] {
    NotNull(path, "path");
    const auto records = RecordsFrom(records_json);
    std::ostringstream out;
    sparity::WriteResultsCsv(out, records, ManifestFrom(manifest_json));
    sparity::WriteTextFile(path, out.str());
  });
}

sp_status sp_write_traces_csv(const char* records_json,
                              const char* manifest_json, const char* path) {
  return Guard([&] {
    NotNull(path, "path");
    const auto records = RecordsFrom(records_json);
    std::ostringstream out;
    sparity::WriteTracesCsv(out, records, ManifestFrom(manifest_json));
    sparity::WriteTextFile(path, out.str());
  });
}

sp_status sp_write_report(const char* path, const char* report_json,
                          const char* manifest_json) {
  return Guard([&] {
    NotNull(path, "path");
    Json doc = ParseJson(report_json, "report");
    if (!doc.is_object()) Fail(ErrorCode::kInvalidArgument, "report must be a JSON object");
    doc["manifest"] = ManifestFrom(manifest_json).ToJson();
    sparity::WriteTextFile(path, doc.dump(2) + "\n");
  });
}

}  // extern "C"
