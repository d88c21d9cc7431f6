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

// Boundary to the perception backends. A provider answers one image at a
// time with attribute detections and figure segmentations in the wire
// format below; everything after the provider call is pure post-processing.
//
// Wire format (one JSON document per image):
//
//   {"dims": {"width": W, "height": H},
//    "detections": [{"label": str, "confidence": num,
//                    "box": [x_min, y_min, x_max, y_max], "mask": RLE?}],
//    "regions": [{"raw_label": str, "confidence": num, "mask": RLE}]}
//
//   RLE = {"width": W, "height": H, "rows": [[[start, len], ...], ...]}
//
// with one run list per mask row. Fixture sidecars use the same schema in a
// "<stem>.detections.json" file next to the image.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iconoread/geometry.hpp"

namespace iconoread {

enum class SemanticClass { kPerson, kAnimal, kOther };

std::string_view SemanticClassName(SemanticClass c);
std::optional<SemanticClass> ParseSemanticClass(std::string_view name);

struct Detection {
  std::string label;
  double confidence = 0.0;
  BoundingBox box;
  std::optional<BinaryMask> mask;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// A region as the backend reports it, before class mapping.
struct RawRegion {
  std::string raw_label;
  double confidence = 0.0;
  BinaryMask mask{1, 1};

  friend bool operator==(const RawRegion&, const RawRegion&) = default;
};

struct SegmentRegion {
  std::string raw_label;
  SemanticClass semantic_class = SemanticClass::kOther;
  BinaryMask mask{1, 1};
  double confidence = 0.0;
};

struct AttributeInstance {
  std::string label;
  PixelPoint location;
  double confidence = 0.0;

  friend bool operator==(const AttributeInstance&,
                         const AttributeInstance&) = default;
};

/// Maps backend region labels onto the person/animal/other vocabulary.
/// Unknown labels map to kOther.
class ClassMap {
 public:
  ClassMap() = default;

  /// person -> PERSON and the animal classes of common detection
  /// vocabularies (bird, cat, dog, horse, sheep, cow, ...) -> ANIMAL.
  static ClassMap Default();

  void Set(std::string raw_label, SemanticClass c);
  SemanticClass Classify(std::string_view raw_label) const;
  const std::map<std::string, SemanticClass, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, SemanticClass, std::less<>> entries_;
};

struct ProviderResponse {
  ImageDims dims;
  std::vector<Detection> detections;
  std::vector<RawRegion> regions;

  friend bool operator==(const ProviderResponse&,
                         const ProviderResponse&) = default;
};

using MaskRuns = std::vector<std::vector<std::pair<int, int>>>;

MaskRuns EncodeRuns(const BinaryMask& mask);
/// Throws kProtocol on overlapping or out-of-range runs.
BinaryMask DecodeRuns(int width, int height, const MaskRuns& rows);

/// Throws kProtocol for invalid JSON or schema violations. Geometric checks
/// against dims happen in DetectAttributes / SegmentFigures.
ProviderResponse ParseProviderResponse(std::string_view json_text);
std::string SerializeProviderResponse(const ProviderResponse& response);

class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderResponse Query(const std::filesystem::path& image) = 0;
};

/// Serves responses from sidecar documents.
class FixtureProvider final : public Provider {
 public:
  /// Without an explicit sidecar, the sidecar is looked up next to each
  /// queried image.
  explicit FixtureProvider(std::optional<std::filesystem::path> sidecar = {})
      : sidecar_(std::move(sidecar)) {}

  static std::filesystem::path SidecarFor(const std::filesystem::path& image);

  /// Throws kProviderUnavailable when the sidecar is missing.
  ProviderResponse Query(const std::filesystem::path& image) override;

 private:
  std::optional<std::filesystem::path> sidecar_;
};

/// Runs `executable <image>` and parses its standard output. The last
/// response is cached so detection and segmentation share one invocation.
class SubprocessProvider final : public Provider {
 public:
  explicit SubprocessProvider(std::filesystem::path executable)
      : executable_(std::move(executable)) {}

  /// kImageUnreadable for a missing image, kProviderUnavailable when the
  /// executable cannot be started, kProtocol on non-zero exit or bad output.
  ProviderResponse Query(const std::filesystem::path& image) override;

 private:
  std::filesystem::path executable_;
  std::optional<std::pair<std::filesystem::path, ProviderResponse>> cache_;
};

/// Detections checked against the response dims (kProtocol on any
/// out-of-range value) and rescaled to `dims` when the provider answered at
/// a different resolution.
std::vector<Detection> DetectAttributes(Provider& provider,
                                        const std::filesystem::path& image,
                                        ImageDims dims);

std::vector<SegmentRegion> SegmentFigures(Provider& provider,
                                          const std::filesystem::path& image,
                                          ImageDims dims,
                                          const ClassMap& class_map);

// Post-provider steps that work on an already-fetched response.
std::vector<Detection> CheckedDetections(const ProviderResponse& response,
                                         ImageDims dims);
std::vector<SegmentRegion> CheckedRegions(const ProviderResponse& response,
                                          ImageDims dims,
                                          const ClassMap& class_map);

enum class LocationMode { kBoxCenter, kMaskCentroid };

std::string_view LocationModeName(LocationMode mode);
std::optional<LocationMode> ParseLocationMode(std::string_view name);

/// Keeps detections with confidence >= threshold, ordered by
/// (confidence desc, label asc, x asc, y asc) and truncated to max_count.
/// kInvalidArgument unless 0 <= threshold <= 1 and max_count >= 1.
std::vector<AttributeInstance> RetainAttributes(
    std::span<const Detection> detections, double threshold, int max_count,
    LocationMode mode = LocationMode::kBoxCenter);

// Same rule over already-located instances.
std::vector<AttributeInstance> RetainAttributes(
    std::span<const AttributeInstance> instances, double threshold,
    int max_count);

}  // namespace iconoread
