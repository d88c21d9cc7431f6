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

// End-to-end orchestration: decode and normalize an image, query the
// provider, retain attributes, build figures, assign actors; and the corpus
// loop that scores a manifest against ground truth.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iconoread/evaluation.hpp"
#include "iconoread/geometry.hpp"
#include "iconoread/knowledge.hpp"
#include "iconoread/providers.hpp"
#include "iconoread/reading.hpp"

namespace iconoread {

inline constexpr std::int64_t kDefaultTargetPixels = 512 * 512;
inline constexpr double kDefaultRetentionThreshold = 0.9;
inline constexpr int kDefaultRetentionMax = 4;

// Environment variable naming the default subprocess provider.
inline constexpr const char* kProviderEnvVar = "ICONOREAD_PROVIDER";

struct ProviderSpec {
  enum class Kind { kFixture, kSubprocess };
  Kind kind = Kind::kFixture;
  std::filesystem::path executable;  // kSubprocess only
};

struct PipelineConfig {
  std::int64_t target_pixels = kDefaultTargetPixels;
  double retention_threshold = kDefaultRetentionThreshold;
  int retention_max = kDefaultRetentionMax;
  double merge_distance = 0.0;
  LocationMode attribute_location = LocationMode::kBoxCenter;
  ClassMap class_map = ClassMap::Default();
  std::filesystem::path database_path;
  ProviderSpec provider;

  /// Throws kInvalidArgument when a field violates its operation's
  /// precondition.
  void Validate() const;
};

/// Path of the database shipped with the library.
std::filesystem::path DefaultDatabasePath();

/// Built-in defaults with the provider taken from ICONOREAD_PROVIDER when set.
PipelineConfig DefaultConfig();

/// Overlays the keys present in a JSON config document onto `config`.
/// Relative paths resolve against `base_dir`. Throws kParse / kSchema.
void ApplyConfigJson(PipelineConfig& config, std::string_view json_text,
                     const std::filesystem::path& base_dir);
void ApplyConfigFile(PipelineConfig& config, const std::filesystem::path& path);

/// Loads config.database_path, reporting any failure as kDatabase.
AssociationDatabase LoadConfiguredDatabase(const PipelineConfig& config);

/// A fixture provider when `fixture` is given, otherwise whatever the config
/// names.
std::unique_ptr<Provider> MakeProvider(
    const PipelineConfig& config,
    const std::optional<std::filesystem::path>& fixture = std::nullopt);

struct ReadingMetadata {
  ImageDims original_dims;
  ImageDims normalized_dims;
  double scale = 1.0;
  std::int64_t target_pixels = 0;
  double retention_threshold = 0.0;
  int retention_max = 0;
  double merge_distance = 0.0;
  LocationMode attribute_location = LocationMode::kBoxCenter;
  std::string database_version;
};

struct Analysis {
  Reading reading;
  ReadingMetadata metadata;
  // Provider detections in normalized space, kept for overlays.
  std::vector<Detection> detections;
};

struct AnalyzeRequest {
  std::filesystem::path image;
  std::optional<std::filesystem::path> fixture;
  std::optional<std::filesystem::path> overlay;
  // Defaults to the image file stem.
  std::string image_id;
};

/// kImageUnreadable, kProviderUnavailable, kProtocol, kDimensionMismatch.
Analysis Analyze(const AnalyzeRequest& request, const PipelineConfig& config,
                 const AssociationDatabase& db, Provider& provider);

/// Stable key order and shortest round-trip floats: identical inputs give
/// identical bytes.
std::string ReadingToJson(const Analysis& analysis);

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> fixture_path;
};

/// Relative paths resolve against the manifest's directory. Throws kManifest.
std::vector<ManifestEntry> LoadManifest(const std::filesystem::path& path);

struct CorpusResult {
  MetricsReport report;
  std::vector<ImageErrorRecord> errors;
  // Manifest order; failed images carry an empty reading.
  std::vector<Analysis> analyses;
};

struct EvaluateOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  std::optional<std::filesystem::path> readings_dir;
};

/// Throws kManifest, kMissingTruth (before any image is analyzed) and
/// kDatabase. Per-image failures become error records.
CorpusResult EvaluateManifest(const std::filesystem::path& manifest_path,
                              const std::filesystem::path& truth_path,
                              const PipelineConfig& config,
                              const EvaluateOptions& options = {});

CorpusResult EvaluateEntries(const std::vector<ManifestEntry>& entries,
                             const std::vector<GroundTruthRecord>& truths,
                             const PipelineConfig& config,
                             const AssociationDatabase& db,
                             const EvaluateOptions& options = {});

}  // namespace iconoread
