/* Copyright 2026 The Iconoread Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line front end. Talks to the engine only through the C API.
//
//   iconoread analyze <image> [--fixture F] [--provider EXE] [--db DB]
//                     [--overlay OUT.png] [--config CFG] [--out READING.json]
//   iconoread evaluate <manifest> <truth> [--provider EXE] [--db DB]
//                      [--config CFG] [--jobs N] [--out REPORT.json]
//                      [--table TABLE.txt] [--readings-dir DIR]
//   iconoread db validate <database.json>
//
// Exit codes: 0 success, 1 validation or evaluation findings, 2 I/O or
// protocol failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "iconoread/iconoread.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitFailure = 2;

struct ConfigDeleter {
  void operator()(icr_config* c) const { icr_config_destroy(c); }
};
struct AnalysisDeleter {
  void operator()(icr_analysis* a) const { icr_analysis_destroy(a); }
};
struct ReportDeleter {
  void operator()(icr_report* r) const { icr_report_destroy(r); }
};
struct StringDeleter {
  void operator()(char* s) const { icr_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int ExitCodeFor(icr_status status) {
  switch (status) {
    case ICR_OK:
      return kExitOk;
    case ICR_ERR_VALIDATION:
    case ICR_ERR_MISSING_TRUTH:
    case ICR_ERR_ID_MISMATCH:
    case ICR_ERR_INVALID_ARGUMENT:
      return kExitFindings;
    default:
      return kExitFailure;
  }
}

int Report(icr_status status) {
  std::cerr << "iconoread: " << icr_status_name(status) << ": "
            << icr_last_error() << "\n";
  return ExitCodeFor(status);
}

bool WriteFile(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  return static_cast<bool>(out);
}

struct CommonFlags {
  std::string config;
  std::string provider;
  std::string db;
  std::optional<long long> target_pixels;
  std::optional<double> threshold;
  std::optional<int> max_attributes;
  std::optional<double> merge_distance;
};

void AddCommonFlags(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON pipeline config");
  app->add_option("--provider", f.provider,
                  "subprocess provider executable (overrides ICONOREAD_PROVIDER)");
  app->add_option("--db", f.db, "association database");
  app->add_option("--target-pixels", f.target_pixels,
                  "pixel budget for normalized images");
  app->add_option("--threshold", f.threshold, "attribute retention threshold");
  app->add_option("--max-attributes", f.max_attributes,
                  "maximum retained attributes per image");
  app->add_option("--merge-distance", f.merge_distance,
                  "figure merge distance in pixels");
}

// Config file first, flags on top.
icr_status BuildConfig(const CommonFlags& f, std::unique_ptr<icr_config, ConfigDeleter>& out) {
  icr_config* raw = nullptr;
  if (icr_status s = icr_config_create(&raw); s != ICR_OK) return s;
  out.reset(raw);
  icr_config* c = out.get();
  if (!f.config.empty()) {
    if (icr_status s = icr_config_load_file(c, f.config.c_str()); s != ICR_OK) return s;
  }
  if (!f.provider.empty()) {
    if (icr_status s = icr_config_use_subprocess_provider(c, f.provider.c_str()); s != ICR_OK) return s;
  }
  if (!f.db.empty()) {
    if (icr_status s = icr_config_set_database_path(c, f.db.c_str()); s != ICR_OK) return s;
  }
  if (f.target_pixels) {
    if (icr_status s = icr_config_set_target_pixels(c, *f.target_pixels); s != ICR_OK) return s;
  }
  if (f.merge_distance) {
    if (icr_status s = icr_config_set_merge_distance(c, *f.merge_distance); s != ICR_OK) return s;
  }
  if (f.threshold) {
    if (icr_status s = icr_config_set_retention_threshold(c, *f.threshold); s != ICR_OK) return s;
  }
  if (f.max_attributes) {
    if (icr_status s = icr_config_set_retention_max(c, *f.max_attributes); s != ICR_OK) return s;
  }
  return ICR_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identify saints in paintings from their attributes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(icr_version()));

  CommonFlags analyze_flags;
  std::string image, fixture, overlay, analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Read one painting");
  analyze->add_option("image", image, "image file")->required();
  analyze->add_option("--fixture", fixture, "fixture sidecar to use as provider");
  analyze->add_option("--overlay", overlay, "write an annotated image here");
  analyze->add_option("--out", analyze_out, "reading JSON (default: stdout)");
  AddCommonFlags(analyze, analyze_flags);

  CommonFlags evaluate_flags;
  std::string manifest, truth, report_out, table_out, readings_dir;
  unsigned jobs = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Score a corpus against ground truth");
  evaluate->add_option("manifest", manifest, "corpus manifest")->required();
  evaluate->add_option("truth", truth, "ground truth")->required();
  evaluate->add_option("--jobs", jobs, "images analyzed concurrently (0: all cores)");
  evaluate->add_option("--out", report_out, "metrics report JSON (default: stdout)");
  evaluate->add_option("--table", table_out, "also write the text table here");
  evaluate->add_option("--readings-dir", readings_dir, "write per-image readings here");
  AddCommonFlags(evaluate, evaluate_flags);

  std::string db_path;
  auto* db = app.add_subcommand("db", "Association database tools");
  db->require_subcommand(1);
  auto* validate = db->add_subcommand("validate", "Check a database file");
  validate->add_option("path", db_path, "database JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitFailure;
  }

  if (*analyze) {
    std::unique_ptr<icr_config, ConfigDeleter> config;
    if (icr_status s = BuildConfig(analyze_flags, config); s != ICR_OK) return Report(s);
    icr_analysis* raw = nullptr;
    const icr_status s = icr_analyze(config.get(), nullptr, image.c_str(),
                                     fixture.empty() ? nullptr : fixture.c_str(),
                                     overlay.empty() ? nullptr : overlay.c_str(),
                                     nullptr, &raw);
    if (s != ICR_OK) return Report(s);
    std::unique_ptr<icr_analysis, AnalysisDeleter> analysis(raw);
    char* json_raw = nullptr;
    if (icr_status js = icr_analysis_to_json(analysis.get(), &json_raw); js != ICR_OK) {
      return Report(js);
    }
    OwnedString json(json_raw);
    if (analyze_out.empty()) {
      std::fputs(json.get(), stdout);
    } else if (!WriteFile(analyze_out, json.get())) {
      std::cerr << "iconoread: cannot write " << analyze_out << "\n";
      return kExitFailure;
    }
    return kExitOk;
  }

  if (*evaluate) {
    std::unique_ptr<icr_config, ConfigDeleter> config;
    if (icr_status s = BuildConfig(evaluate_flags, config); s != ICR_OK) return Report(s);
    icr_report* raw = nullptr;
    const icr_status s =
        icr_evaluate(config.get(), manifest.c_str(), truth.c_str(), jobs,
                     readings_dir.empty() ? nullptr : readings_dir.c_str(), &raw);
    if (s != ICR_OK) return Report(s);
    std::unique_ptr<icr_report, ReportDeleter> report(raw);

    char* json_raw = nullptr;
    char* table_raw = nullptr;
    if (icr_status js = icr_report_to_json(report.get(), &json_raw); js != ICR_OK) return Report(js);
    OwnedString json(json_raw);
    if (icr_status ts = icr_report_to_table(report.get(), &table_raw); ts != ICR_OK) return Report(ts);
    OwnedString table(table_raw);

    if (report_out.empty()) {
      std::fputs(json.get(), stdout);
    } else if (!WriteFile(report_out, json.get())) {
      std::cerr << "iconoread: cannot write " << report_out << "\n";
      return kExitFailure;
    }
    if (!table_out.empty() && !WriteFile(table_out, table.get())) {
      std::cerr << "iconoread: cannot write " << table_out << "\n";
      return kExitFailure;
    }
    std::fputs(table.get(), report_out.empty() ? stderr : stdout);

    const size_t failures = icr_report_error_count(report.get());
    if (failures > 0) {
      std::cerr << "iconoread: " << failures << " image(s) could not be analyzed\n";
      return kExitFindings;
    }
    return kExitOk;
  }

  if (*validate) {
    char* findings_raw = nullptr;
    size_t errors = 0;
    const icr_status s = icr_db_validate(db_path.c_str(), &findings_raw, &errors);
    if (s != ICR_OK) return Report(s);
    OwnedString findings(findings_raw);
    std::fputs(findings.get(), stdout);
    if (errors > 0) return kExitFindings;
    std::cout << "ok\n";
    return kExitOk;
  }
  return kExitFailure;
}
