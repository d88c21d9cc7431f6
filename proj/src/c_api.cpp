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

#include "iconoread/iconoread.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iconoread/error.hpp"
#include "iconoread/evaluation.hpp"
#include "iconoread/knowledge.hpp"
#include "iconoread/pipeline.hpp"
#include "io_util.hpp"

struct icr_config {
  iconoread::PipelineConfig config;
};

struct icr_database {
  iconoread::AssociationDatabase db;
};

struct icr_analysis {
  iconoread::Analysis analysis;
};

struct icr_report {
  iconoread::CorpusResult result;
  std::vector<std::string> saints;
};

namespace {

thread_local std::string g_last_error;

icr_status Fail(icr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
icr_status Guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return ICR_OK;
  } catch (const iconoread::Error& e) {
    return Fail(static_cast<icr_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(ICR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(ICR_ERR_INTERNAL, e.what());
  }
}

char* Duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Require(bool ok, const char* what) {
  if (!ok) {
    throw iconoread::Error(iconoread::ErrorCode::kInvalidArgument,
                           std::string(what) + " must not be NULL");
  }
}

std::optional<std::filesystem::path> OptionalPath(const char* p) {
  if (!p || !*p) return std::nullopt;
  return std::filesystem::path(p);
}

}  // namespace

extern "C" {

const char* icr_version(void) { return "1.0.0"; }

const char* icr_status_name(icr_status status) {
  if (status == ICR_OK) return "OK";
  static thread_local std::string name;
  name = iconoread::ErrorCodeName(static_cast<iconoread::ErrorCode>(status));
  return name.c_str();
}

const char* icr_last_error(void) { return g_last_error.c_str(); }

void icr_string_free(char* s) { std::free(s); }

icr_status icr_config_create(icr_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new icr_config{iconoread::DefaultConfig()};
  });
}

void icr_config_destroy(icr_config* config) { delete config; }

icr_status icr_config_load_file(icr_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "config and path");
    iconoread::PipelineConfig updated = config->config;
    iconoread::ApplyConfigFile(updated, path);
    updated.Validate();
    config->config = std::move(updated);
  });
}

icr_status icr_config_set_target_pixels(icr_config* config, int64_t n) {
  return Guard([&] {
    Require(config, "config");
    auto updated = config->config;
    updated.target_pixels = n;
    updated.Validate();
    config->config = std::move(updated);
  });
}

icr_status icr_config_set_retention_threshold(icr_config* config,
                                              double threshold) {
  return Guard([&] {
    Require(config, "config");
    auto updated = config->config;
    updated.retention_threshold = threshold;
    updated.Validate();
    config->config = std::move(updated);
  });
}

icr_status icr_config_set_retention_max(icr_config* config, int max_count) {
  return Guard([&] {
    Require(config, "config");
    auto updated = config->config;
    updated.retention_max = max_count;
    updated.Validate();
    config->config = std::move(updated);
  });
}

icr_status icr_config_set_merge_distance(icr_config* config, double d) {
  return Guard([&] {
    Require(config, "config");
    auto updated = config->config;
    updated.merge_distance = d;
    updated.Validate();
    config->config = std::move(updated);
  });
}

icr_status icr_config_set_database_path(icr_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "config and path");
    config->config.database_path = path;
  });
}

icr_status icr_config_use_fixture_provider(icr_config* config) {
  return Guard([&] {
    Require(config, "config");
    config->config.provider = {iconoread::ProviderSpec::Kind::kFixture, {}};
  });
}

icr_status icr_config_use_subprocess_provider(icr_config* config,
                                              const char* executable) {
  return Guard([&] {
    Require(config && executable && *executable, "config and executable");
    config->config.provider = {iconoread::ProviderSpec::Kind::kSubprocess,
                               executable};
  });
}

icr_status icr_database_load(const char* path, icr_database** out) {
  return Guard([&] {
    Require(path && out, "path and out");
    *out = new icr_database{iconoread::LoadDatabaseFile(path)};
  });
}

void icr_database_destroy(icr_database* db) { delete db; }

const char* icr_database_version(const icr_database* db) {
  return db ? db->db.version().c_str() : "";
}

size_t icr_database_candidate_count(const icr_database* db,
                                    const char* attribute) {
  if (!db || !attribute) return 0;
  return db->db.SaintsFor(attribute).size();
}

icr_status icr_database_candidate(const icr_database* db, const char* attribute,
                                  size_t index, const char** saint,
                                  double* prior) {
  return Guard([&] {
    Require(db && attribute, "db and attribute");
    const auto candidates = db->db.SaintsFor(attribute);
    if (index >= candidates.size()) {
      throw iconoread::Error(iconoread::ErrorCode::kInvalidArgument,
                             "candidate index out of range");
    }
    if (saint) *saint = candidates[index].saint.c_str();
    if (prior) *prior = candidates[index].prior;
  });
}

icr_status icr_db_validate(const char* path, char** findings,
                           size_t* error_count) {
  return Guard([&] {
    Require(path && findings && error_count, "path, findings and error_count");
    std::vector<iconoread::Finding> found;
    try {
      const auto doc = iconoread::ParseDatabaseDocument(
          iconoread::internal::ReadTextFile(path));
      found = iconoread::ValidateDatabase(doc);
    } catch (const iconoread::Error& e) {
      // A structurally incomplete document is a finding, not a parse failure.
      if (e.code() != iconoread::ErrorCode::kSchema) throw;
      found.push_back({iconoread::Severity::kError, "", e.what()});
    }
    std::string text;
    size_t errors = 0;
    for (const auto& f : found) {
      text += iconoread::FormatFinding(f) + "\n";
      if (f.severity == iconoread::Severity::kError) ++errors;
    }
    *findings = Duplicate(text);
    *error_count = errors;
  });
}

icr_status icr_analyze(const icr_config* config, const icr_database* db,
                       const char* image_path, const char* fixture,
                       const char* overlay_path, const char* image_id,
                       icr_analysis** out) {
  return Guard([&] {
    Require(config && image_path && out, "config, image_path and out");
    std::optional<iconoread::AssociationDatabase> loaded;
    if (!db) loaded = iconoread::LoadConfiguredDatabase(config->config);
    const auto& database = db ? db->db : *loaded;
    iconoread::AnalyzeRequest request{image_path, OptionalPath(fixture),
                                      OptionalPath(overlay_path),
                                      image_id ? image_id : ""};
    auto provider = iconoread::MakeProvider(config->config, request.fixture);
    *out = new icr_analysis{
        iconoread::Analyze(request, config->config, database, *provider)};
  });
}

void icr_analysis_destroy(icr_analysis* analysis) { delete analysis; }

icr_status icr_analysis_to_json(const icr_analysis* analysis, char** json) {
  return Guard([&] {
    Require(analysis && json, "analysis and json");
    *json = Duplicate(iconoread::ReadingToJson(analysis->analysis));
  });
}

size_t icr_analysis_figure_count(const icr_analysis* analysis) {
  return analysis ? analysis->analysis.reading.figures.size() : 0;
}

size_t icr_analysis_assignment_count(const icr_analysis* analysis) {
  return analysis ? analysis->analysis.reading.assignments.size() : 0;
}

icr_status icr_analysis_assignment(const icr_analysis* analysis, size_t index,
                                   int* figure_id, const char** saint,
                                   const char** attribute) {
  return Guard([&] {
    Require(analysis, "analysis");
    const auto& assignments = analysis->analysis.reading.assignments;
    if (index >= assignments.size()) {
      throw iconoread::Error(iconoread::ErrorCode::kInvalidArgument,
                             "assignment index out of range");
    }
    const auto& a = assignments[index];
    if (figure_id) *figure_id = a.figure_id;
    if (saint) *saint = a.saint.c_str();
    if (attribute) *attribute = a.via_attribute.c_str();
  });
}

icr_status icr_evaluate(const icr_config* config, const char* manifest,
                        const char* truth, unsigned jobs,
                        const char* readings_dir, icr_report** out) {
  return Guard([&] {
    Require(config && manifest && truth && out, "config, manifest, truth and out");
    iconoread::EvaluateOptions options;
    options.jobs = jobs;
    options.readings_dir = OptionalPath(readings_dir);
    auto report = std::make_unique<icr_report>();
    report->result =
        iconoread::EvaluateManifest(manifest, truth, config->config, options);
    for (const auto& [saint, m] : report->result.report.per_saint) {
      report->saints.push_back(saint);
    }
    *out = report.release();
  });
}

void icr_report_destroy(icr_report* report) { delete report; }

icr_status icr_report_to_json(const icr_report* report, char** json) {
  return Guard([&] {
    Require(report && json, "report and json");
    *json = Duplicate(iconoread::MetricsReportToJson(report->result.report,
                                                     report->result.errors));
  });
}

icr_status icr_report_to_table(const icr_report* report, char** table) {
  return Guard([&] {
    Require(report && table, "report and table");
    *table = Duplicate(iconoread::RenderMetricsTable(report->result.report));
  });
}

size_t icr_report_error_count(const icr_report* report) {
  return report ? report->result.errors.size() : 0;
}

size_t icr_report_saint_count(const icr_report* report) {
  return report ? report->saints.size() : 0;
}

icr_status icr_report_saint(const icr_report* report, size_t index,
                            const char** saint, int64_t* tp, int64_t* fp,
                            int64_t* fn, double* precision, double* recall) {
  return Guard([&] {
    Require(report, "report");
    if (index >= report->saints.size()) {
      throw iconoread::Error(iconoread::ErrorCode::kInvalidArgument,
                             "saint index out of range");
    }
    const std::string& name = report->saints[index];
    const auto& m = report->result.report.per_saint.find(name)->second;
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    if (saint) *saint = name.c_str();
    if (tp) *tp = m.counts.tp;
    if (fp) *fp = m.counts.fp;
    if (fn) *fn = m.counts.fn;
    if (precision) *precision = m.precision.value_or(kNaN);
    if (recall) *recall = m.recall.value_or(kNaN);
  });
}

}  // extern "C"
