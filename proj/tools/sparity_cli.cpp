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


// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparity/sparity.h"

namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& what)
      : std::runtime_error(what), status(code) {}
  int status;
};

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "json";
  int workers = 0;
  bool trace = false;
};

void Check(sp_status status) {
  if (status != SP_OK) {
    throw CliError(static_cast<int>(status),
                   std::string(sp_status_name(status)) + ": " + sp_last_error());
  }
}

// Takes ownership of a string returned by the library.
std::string Take(char* text) {
  std::unique_ptr<char, decltype(&sp_string_free)> owned(text, sp_string_free);
  return text ? std::string(text) : std::string();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(SP_ERR_IO, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string Real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Config file, then --set overrides, then --seed.
Json BuildRequest(const Options& opt, bool takes_seed) {
  Json request = Json::object();
  if (!opt.config_path.empty()) {
    char* out = nullptr;
    Check(sp_parse_document(ReadFile(opt.config_path).c_str(), &out));
    request = Json::parse(Take(out));
  }
  for (const std::string& item : opt.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CliError(SP_ERR_CONFIG, "--set expects key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    Json parsed = Json::parse(value, nullptr, false);
    request[key] = parsed.is_discarded() ? Json(value) : parsed;
  }
  if (opt.seed) {
    if (!takes_seed) {
      throw CliError(SP_ERR_CONFIG, "this subcommand takes no seed");
    }
    request["seed"] = *opt.seed;
  }
  return request;
}

std::uint64_t SeedOf(const Json& request) {
  if (request.contains("seed") && request["seed"].is_number_unsigned()) {
    return request["seed"].get<std::uint64_t>();
  }
  return 0;
}

class Artifacts {
 public:
  Artifacts(std::string subcommand, const Options& opt, Json request)
      : subcommand_(std::move(subcommand)),
        dir_(opt.out_dir),
        request_(std::move(request)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw CliError(SP_ERR_IO, "cannot create " + dir_.string());
  }

  std::string Path(const std::string& name) {
    const std::string p = (dir_ / name).string();
    outputs_.push_back(p);
    return p;
  }

  // Manifest listing every path reserved so far.
  std::string Manifest() const {
    char* out = nullptr;
    Check(sp_manifest_json(subcommand_.c_str(), request_.dump().c_str(),
                           SeedOf(request_), Json(outputs_).dump().c_str(),
                           &out));
    return Take(out);
  }

  void WriteReport(const std::string& path, const std::string& report) const {
    Check(sp_write_report(path.c_str(), report.c_str(), Manifest().c_str()));
  }

  void WriteTable(const std::string& path, const std::string& header,
                  const std::vector<std::string>& rows) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError(SP_ERR_IO, "cannot write " + path);
    out << "# manifest " << Manifest() << '\n' << header << '\n';
    for (const auto& row : rows) out << row << '\n';
    if (!out) throw CliError(SP_ERR_IO, "error writing " + path);
  }

  const std::string& subcommand() const { return subcommand_; }

 private:
  std::string subcommand_;
  fs::path dir_;
  Json request_;
  std::vector<std::string> outputs_;
};

Json RunCommand(const std::string& name, const Json& request) {
  char* out = nullptr;
  Check(sp_run_command(name.c_str(), request.dump().c_str(), &out));
  return Json::parse(Take(out));
}

bool WantCsv(const Options& opt) {
  if (opt.format == "csv") return true;
  if (opt.format == "json") return false;
  throw CliError(SP_ERR_CONFIG, "unknown output format '" + opt.format + "'");
}

void Fourier(const Options& opt) {
  const Json request = BuildRequest(opt, false);
  const Json report = RunCommand("fourier", request);
  Artifacts art("fourier", opt, request);
  const std::string json_path = art.Path("fourier.json");
  if (WantCsv(opt)) {
    const bool brute = report.contains("max_abs_diff");
    std::vector<std::string> rows;
    for (const Json& c : report["coefficients"]) {
      std::string row = std::to_string(c["d"].get<int>()) + "," +
                        c["exact"].get<std::string>() + "," +
                        Real(c["value"].get<double>());
      if (brute) row += "," + Real(c["brute_force"].get<double>());
      rows.push_back(row);
    }
    art.WriteTable(art.Path("fourier.csv"),
                   brute ? "d,exact,value,brute_force" : "d,exact,value", rows);
  }
  art.WriteReport(json_path, report.dump());
  std::cout << report.dump(2) << '\n';
}

void Popgrad(const Options& opt) {
  const Json request = BuildRequest(opt, false);
  const Json report = RunCommand("popgrad", request);
  Artifacts art("popgrad", opt, request);
  const std::string json_path = art.Path("popgrad.json");
  if (WantCsv(opt)) {
    const Json& neuron = report["neuron"];
    const bool brute = neuron.contains("brute_force");
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < neuron["gradient"].size(); ++i) {
      std::string row = std::to_string(i) + "," + Real(neuron["gradient"][i].get<double>());
      if (brute) row += "," + Real(neuron["brute_force"][i].get<double>());
      rows.push_back(row);
    }
    art.WriteTable(art.Path("popgrad.csv"),
                   brute ? "i,gradient,brute_force" : "i,gradient", rows);
  }
  art.WriteReport(json_path, report.dump());
  std::cout << report.dump(2) << '\n';
}

void Train(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  const Json record = RunCommand("train", request);
  Artifacts art("train", opt, request);
  const std::string json_path = art.Path("train.json");
  const std::string records = Json::array({record}).dump();
  const std::string csv = WantCsv(opt) ? art.Path("results.csv") : "";
  const std::string trace = opt.trace ? art.Path("trace.csv") : "";
  if (!csv.empty()) {
    Check(sp_write_records_csv(records.c_str(), art.Manifest().c_str(), csv.c_str()));
  }
  if (!trace.empty()) {
    Check(sp_write_traces_csv(records.c_str(), art.Manifest().c_str(), trace.c_str()));
  }
  art.WriteReport(json_path, record.dump());
  std::cout << "success " << record["success"].get<bool>() << " steps "
            << record["steps_to_success"].dump() << " test_err "
            << Real(record["final_test_err"].get<double>()) << '\n';
}

void Sweep(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  sp_sweep* raw = nullptr;
  Check(sp_sweep_run(request.dump().c_str(), opt.workers, &raw));
  std::unique_ptr<sp_sweep, decltype(&sp_sweep_free)> sweep(raw, sp_sweep_free);

  char* canonical = nullptr;
  Check(sp_parse_config(request.dump().c_str(), &canonical));
  Artifacts art("sweep", opt, Json::parse(Take(canonical)));
  const std::string results =
      art.Path(WantCsv(opt) ? "results.csv" : "results.json");
  const std::string summary_path = art.Path("summary.json");
  char* written = nullptr;
  Check(sp_sweep_emit(sweep.get(), opt.format.c_str(), opt.out_dir.c_str(),
                      art.Manifest().c_str(), &written));
  Take(written);
  char* summary = nullptr;
  Check(sp_sweep_summary_json(sweep.get(), &summary));
  const Json doc = Json::parse(Take(summary));
  art.WriteReport(summary_path, doc.dump());
  for (const Json& cell : doc["cells"]) {
    std::cout << "n=" << cell["n"] << " k=" << cell["k"] << " m=" << cell["m"]
              << " r=" << cell["r"] << " " << cell["scheme"].get<std::string>()
              << " s=" << cell["s"] << "  " << cell["successes"] << "/"
              << cell["trials"] << '\n';
  }
}

void Lottery(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  const Json report = RunCommand("lottery", request);
  Artifacts art("lottery", opt, request);
  const std::string json_path = art.Path("lottery.json");
  Json all = Json::array();
  Json full = report["full"];
  full["scheme"] = "full";
  all.push_back(full);
  for (const Json& rec : report["rewound"]) all.push_back(rec);
  for (const Json& rec : report["random"]) all.push_back(rec);
  if (WantCsv(opt)) {
    const std::string csv = art.Path("lottery.csv");
    const std::string traces = art.Path("lottery_traces.csv");
    Check(sp_write_records_csv(all.dump().c_str(), art.Manifest().c_str(), csv.c_str()));
    Check(sp_write_traces_csv(all.dump().c_str(), art.Manifest().c_str(), traces.c_str()));
  }
  art.WriteReport(json_path, report.dump());
  std::cout << "full success " << report["full"]["success"].get<bool>()
            << "\nkept " << report["kept"].dump() << "\nrewound "
            << report["rewound_successes"] << "/" << report["rewound"].size()
            << "\nrandom " << report["random_successes"] << "/"
            << report["random"].size() << "\np_value "
            << Real(report["p_value"].get<double>()) << '\n';
}

void SqCheck(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  const Json report = RunCommand("sqcheck", request);
  Artifacts art("sqcheck", opt, request);
  const std::string json_path = art.Path("sqcheck.json");
  std::vector<std::string> rows;
  for (const Json& row : report["table"]) {
    std::string support;
    for (const Json& i : row["support"]) {
      support += (support.empty() ? "" : " ") + std::to_string(i.get<int>());
    }
    rows.push_back(support + "," + Real(row["max_corr"].get<double>()) + "," +
                   (row["hidden"].get<bool>() ? "1" : "0"));
  }
  if (WantCsv(opt)) {
    art.WriteTable(art.Path("sqcheck.csv"), "support,max_corr,hidden", rows);
  }
  art.WriteReport(json_path, report.dump());
  std::cout << "support,max_corr,hidden\n";
  for (const auto& row : rows) std::cout << row << '\n';
  Json brief = report;
  brief.erase("table");
  std::cout << brief.dump(2) << '\n';
}

void TheoryOversparse(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  const Json report = RunCommand("theory-oversparse", request);
  Artifacts art("theory-oversparse", opt, request);
  art.WriteReport(art.Path("theory-oversparse.json"), report.dump());
  std::cout << report.dump(2) << '\n';
}

void TheoryUndersparse(const Options& opt) {
  const Json request = BuildRequest(opt, true);
  const Json report = RunCommand("theory-undersparse", request);
  Artifacts art("theory-undersparse", opt, request);
  const std::string json_path = art.Path("theory-undersparse.json");
  if (WantCsv(opt)) {
    std::vector<std::string> rows;
    for (const Json& run : report["runs"]) {
      rows.push_back(std::to_string(run["init_seed"].get<std::uint64_t>()) + "," +
                     (run["pass"].get<bool>() ? "1" : "0") + "," +
                     std::to_string(run["good_neurons"].size()) + "," +
                     std::to_string(run["passing"].size()) + "," +
                     Real(run["max_support_deviation"].get<double>()) + "," +
                     Real(run["max_off_support"].get<double>()) + "," +
                     (run["infeasible_gamma"].get<bool>() ? "1" : "0"));
    }
    art.WriteTable(art.Path("theory-undersparse.csv"),
                   "init_seed,pass,good_neurons,passing,max_support_deviation,"
                   "max_off_support,infeasible_gamma",
                   rows);
  }
  art.WriteReport(json_path, report.dump());
  std::cout << "passes " << report["passes"] << "/" << report["seeds"]
            << " width " << report["width"] << '\n';
}

CLI::App* AddCommand(CLI::App& app, const std::string& name,
                     const std::string& about, Options& opt) {
  CLI::App* sub = app.add_subcommand(name, about);
  sub->add_option("-c,--config", opt.config_path,
                  "request file (JSON or key = value lines)");
  sub->add_option("-D,--set", opt.overrides, "override a request field: key=value");
  sub->add_option("--seed", opt.seed, "base seed");
  sub->add_option("--out-dir", opt.out_dir, "directory for output files");
  sub->add_option("--format", opt.format, "table format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse parity learning laboratory"};
  app.set_version_flag("--version", std::string(sp_version()));
  app.require_subcommand(1);
  Options opt;

  AddCommand(app, "fourier", "Majority / Half Fourier coefficients", opt)
      ->callback([&] { Fourier(opt); });
  AddCommand(app, "popgrad", "population gradient of a sparse neuron", opt)
      ->callback([&] { Popgrad(opt); });
  auto* train = AddCommand(app, "train", "train one network", opt);
  train->add_flag("--trace", opt.trace, "also write trace.csv");
  train->callback([&] { Train(opt); });
  auto* sweep = AddCommand(app, "sweep", "grid sweep", opt);
  sweep->add_option("--workers", opt.workers,
                    "worker threads (default: SPARITY_WORKERS or all cores)");
  sweep->callback([&] { Sweep(opt); });
  AddCommand(app, "lottery", "prune, rewind and retrain", opt)
      ->callback([&] { Lottery(opt); });
  AddCommand(app, "sqcheck", "statistical-query audit of a label-free run", opt)
      ->callback([&] { SqCheck(opt); });
  AddCommand(app, "theory-oversparse", "over-sparse two-phase construction", opt)
      ->callback([&] { TheoryOversparse(opt); });
  AddCommand(app, "theory-undersparse", "under-sparse one-step construction", opt)
      ->callback([&] { TheoryUndersparse(opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    std::cerr << "sparity: " << e.what() << '\n';
    return e.status;
  } catch (const std::exception& e) {
    std::cerr << "sparity: " << e.what() << '\n';
    return SP_ERR_INTERNAL;
  }
  return 0;
}
