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

#include "iconoread/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "iconoread/error.hpp"
#include "image_io.hpp"
#include "io_util.hpp"

#ifndef ICONOREAD_DEFAULT_DATABASE
#define ICONOREAD_DEFAULT_DATABASE "default_database.json"
#endif

namespace iconoread {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void ConfigSchema(const std::string& msg) {
  throw Error(ErrorCode::kSchema, "config: " + msg);
}

fs::path Resolve(const fs::path& base_dir, const fs::path& p) {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

json Point(const PixelPoint& p) { return json::array({p.x, p.y}); }
json Dims(const ImageDims& d) { return json::array({d.width, d.height}); }

json AttributeJson(const AttributeInstance& a) {
  return {{"label", a.label},
          {"confidence", a.confidence},
          {"location", Point(a.location)}};
}

}  // namespace

void PipelineConfig::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidArgument, "config: " + msg);
  };
  if (target_pixels < 1) fail("target_pixels must be >= 1");
  if (!(retention_threshold >= 0.0 && retention_threshold <= 1.0)) {
    fail("retention_threshold must lie in [0, 1]");
  }
  if (retention_max < 1) fail("retention_max must be >= 1");
  if (!std::isfinite(merge_distance) || merge_distance < 0.0) {
    fail("merge_distance must be a finite value >= 0");
  }
  if (provider.kind == ProviderSpec::Kind::kSubprocess &&
      provider.executable.empty()) {
    fail("subprocess provider needs an executable");
  }
}

fs::path DefaultDatabasePath() { return fs::path(ICONOREAD_DEFAULT_DATABASE); }

PipelineConfig DefaultConfig() {
  PipelineConfig config;
  config.database_path = DefaultDatabasePath();
  if (const char* exe = std::getenv(kProviderEnvVar); exe && *exe) {
    config.provider = {ProviderSpec::Kind::kSubprocess, exe};
  }
  return config;
}

void ApplyConfigJson(PipelineConfig& config, std::string_view json_text,
                     const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!root.is_object()) ConfigSchema("document must be an object");

  for (const auto& [key, value] : root.items()) {
    if (key == "target_pixels") {
      if (!value.is_number_integer()) ConfigSchema("target_pixels must be an integer");
      config.target_pixels = value.get<std::int64_t>();
    } else if (key == "retention_threshold") {
      if (!value.is_number()) ConfigSchema("retention_threshold must be a number");
      config.retention_threshold = value.get<double>();
    } else if (key == "retention_max") {
      if (!value.is_number_integer()) ConfigSchema("retention_max must be an integer");
      config.retention_max = value.get<int>();
    } else if (key == "merge_distance") {
      if (!value.is_number()) ConfigSchema("merge_distance must be a number");
      config.merge_distance = value.get<double>();
    } else if (key == "attribute_location") {
      auto mode = value.is_string() ? ParseLocationMode(value.get<std::string>())
                                    : std::nullopt;
      if (!mode) ConfigSchema("attribute_location must be box_center or mask_centroid");
      config.attribute_location = *mode;
    } else if (key == "class_map") {
      if (!value.is_object()) ConfigSchema("class_map must be an object");
      ClassMap map;
      for (const auto& [raw, cls] : value.items()) {
        auto c = cls.is_string() ? ParseSemanticClass(cls.get<std::string>())
                                 : std::nullopt;
        if (!c) ConfigSchema("class_map values must be PERSON, ANIMAL or OTHER");
        map.Set(raw, *c);
      }
      config.class_map = std::move(map);
    } else if (key == "database_path") {
      if (!value.is_string()) ConfigSchema("database_path must be a string");
      config.database_path = Resolve(base_dir, value.get<std::string>());
    } else if (key == "provider") {
      if (value == "fixture") {
        config.provider = {ProviderSpec::Kind::kFixture, {}};
      } else if (value.is_object() && value.contains("subprocess") &&
                 value["subprocess"].is_string()) {
        config.provider = {ProviderSpec::Kind::kSubprocess,
                           Resolve(base_dir, value["subprocess"].get<std::string>())};
      } else {
        ConfigSchema("provider must be \"fixture\" or {\"subprocess\": path}");
      }
    } else {
      ConfigSchema("unknown key \"" + key + "\"");
    }
  }
}

void ApplyConfigFile(PipelineConfig& config, const fs::path& path) {
  ApplyConfigJson(config, internal::ReadTextFile(path), path.parent_path());
}

AssociationDatabase LoadConfiguredDatabase(const PipelineConfig& config) {
  try {
    return LoadDatabaseFile(config.database_path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kDatabase, "association database " +
                                          config.database_path.string() +
                                          ": " + e.what());
  }
}

std::unique_ptr<Provider> MakeProvider(const PipelineConfig& config,
                                       const std::optional<fs::path>& fixture) {
  if (fixture) return std::make_unique<FixtureProvider>(*fixture);
  if (config.provider.kind == ProviderSpec::Kind::kSubprocess) {
    return std::make_unique<SubprocessProvider>(config.provider.executable);
  }
  return std::make_unique<FixtureProvider>();
}

Analysis Analyze(const AnalyzeRequest& request, const PipelineConfig& config,
                 const AssociationDatabase& db, Provider& provider) {
  config.Validate();
  Analysis analysis;
  auto& meta = analysis.metadata;
  meta.original_dims = internal::DecodeImageDims(request.image);
  const ScaledDims scaled = NormalizeScale(meta.original_dims, config.target_pixels);
  meta.normalized_dims = scaled.dims;
  meta.scale = scaled.scale;
  meta.target_pixels = config.target_pixels;
  meta.retention_threshold = config.retention_threshold;
  meta.retention_max = config.retention_max;
  meta.merge_distance = config.merge_distance;
  meta.attribute_location = config.attribute_location;
  meta.database_version = db.version();

  const ProviderResponse response = provider.Query(request.image);
  analysis.detections = CheckedDetections(response, scaled.dims);
  const auto regions = CheckedRegions(response, scaled.dims, config.class_map);

  const auto retained =
      RetainAttributes(analysis.detections, config.retention_threshold,
                       config.retention_max, config.attribute_location);
  const auto figures = BuildFigures(regions, config.merge_distance);
  analysis.reading = AssignActors(figures, retained, db);
  analysis.reading.image_id =
      request.image_id.empty() ? request.image.stem().string() : request.image_id;

  if (request.overlay) {
    internal::WriteOverlay(request.image, analysis, *request.overlay);
  }
  return analysis;
}

std::string ReadingToJson(const Analysis& analysis) {
  const Reading& r = analysis.reading;
  const ReadingMetadata& m = analysis.metadata;

  json figures = json::array();
  for (const auto& f : r.figures) {
    const auto box = f.merged_mask.TightBox();
    figures.push_back(
        {{"id", f.id},
         {"member_regions", f.member_region_indices},
         {"centroid", Point(f.centroid)},
         {"pixel_count", f.merged_mask.CountSet()},
         {"box", box ? json::array({box->x_min, box->y_min, box->x_max, box->y_max})
                     : json(nullptr)}});
  }
  json attributes = json::array();
  for (const auto& a : r.attributes) attributes.push_back(AttributeJson(a));
  json assignments = json::array();
  for (const auto& a : r.assignments) {
    assignments.push_back({{"figure_id", a.figure_id},
                           {"saint", a.saint},
                           {"via_attribute", a.via_attribute},
                           {"attribute_index", a.attribute_index},
                           {"attribute_confidence", a.attribute_confidence},
                           {"distance", a.distance},
                           {"candidate_rank", a.candidate_rank}});
  }
  json unassigned = json::array();
  for (const auto& a : r.unassigned_attributes) unassigned.push_back(AttributeJson(a));

  json root = {
      {"image_id", r.image_id},
      {"metadata",
       {{"original_dims", Dims(m.original_dims)},
        {"normalized_dims", Dims(m.normalized_dims)},
        {"scale", m.scale},
        {"target_pixels", m.target_pixels},
        {"retention_threshold", m.retention_threshold},
        {"retention_max", m.retention_max},
        {"merge_distance", m.merge_distance},
        {"attribute_location", std::string(LocationModeName(m.attribute_location))},
        {"database_version", m.database_version}}},
      {"figures", figures},
      {"attributes", attributes},
      {"assignments", assignments},
      {"unassigned_attributes", unassigned},
      {"warnings", r.warnings}};
  return root.dump(2) + "\n";
}

std::vector<ManifestEntry> LoadManifest(const fs::path& path) {
  const std::string text = internal::ReadTextFile(path, ErrorCode::kManifest);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kManifest, "manifest: " + std::string(e.what()));
  }
  if (!root.is_array()) throw Error(ErrorCode::kManifest, "manifest must be an array");
  const fs::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& item = root[i];
    const std::string where = "manifest[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("image_id") ||
        !item["image_id"].is_string() || !item.contains("image_path") ||
        !item["image_path"].is_string()) {
      throw Error(ErrorCode::kManifest, where + " needs string image_id and image_path");
    }
    ManifestEntry e;
    e.image_id = item["image_id"].get<std::string>();
    e.image_path = Resolve(base, item["image_path"].get<std::string>());
    if (auto f = item.find("fixture_path"); f != item.end() && !f->is_null()) {
      if (!f->is_string()) throw Error(ErrorCode::kManifest, where + ".fixture_path must be a string");
      e.fixture_path = Resolve(base, f->get<std::string>());
    }
    if (e.image_id.empty() || !ids.insert(e.image_id).second) {
      throw Error(ErrorCode::kManifest,
                  where + " has an empty or duplicate image_id \"" + e.image_id + "\"");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

CorpusResult EvaluateEntries(const std::vector<ManifestEntry>& entries,
                             const std::vector<GroundTruthRecord>& truths,
                             const PipelineConfig& config,
                             const AssociationDatabase& db,
                             const EvaluateOptions& options) {
  config.Validate();
  std::set<std::string_view> truth_ids;
  for (const auto& t : truths) truth_ids.insert(t.image_id);
  for (const auto& e : entries) {
    if (!truth_ids.count(e.image_id)) {
      throw Error(ErrorCode::kMissingTruth,
                  "manifest image \"" + e.image_id + "\" has no ground truth");
    }
  }

  CorpusResult result;
  result.analyses.resize(entries.size());
  std::vector<std::optional<ImageErrorRecord>> failures(entries.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= entries.size()) return;
      const ManifestEntry& entry = entries[i];
      try {
        auto provider = MakeProvider(config, entry.fixture_path);
        AnalyzeRequest request{entry.image_path, std::nullopt, std::nullopt,
                               entry.image_id};
        result.analyses[i] = Analyze(request, config, db, *provider);
        if (options.readings_dir) {
          internal::WriteTextFile(
              *options.readings_dir / (entry.image_id + ".reading.json"),
              ReadingToJson(result.analyses[i]));
        }
      } catch (const Error& e) {
        failures[i] = ImageErrorRecord{entry.image_id,
                                       std::string(ErrorCodeName(e.code())), e.what()};
      } catch (const std::exception& e) {
        failures[i] = ImageErrorRecord{entry.image_id, "InternalError", e.what()};
      }
      if (failures[i]) {
        result.analyses[i] = Analysis{};
        result.analyses[i].reading.image_id = entry.image_id;
      }
    }
  };

  unsigned jobs = options.jobs ? options.jobs : std::thread::hardware_concurrency();
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (auto& f : failures) {
    if (f) result.errors.push_back(std::move(*f));
  }
  std::vector<Reading> readings;
  readings.reserve(result.analyses.size());
  for (const auto& a : result.analyses) readings.push_back(a.reading);
  result.report = EvaluateCorpus(readings, truths);
  return result;
}

CorpusResult EvaluateManifest(const fs::path& manifest_path,
                              const fs::path& truth_path,
                              const PipelineConfig& config,
                              const EvaluateOptions& options) {
  const auto entries = LoadManifest(manifest_path);
  const auto truths = ParseGroundTruth(internal::ReadTextFile(truth_path));
  const auto db = LoadConfiguredDatabase(config);
  return EvaluateEntries(entries, truths, config, db, options);
}

}  // namespace iconoread
