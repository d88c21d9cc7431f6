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

// Scoring readings against expert identifications: per-saint confusion
// counts, precision TP/(TP+FP) and recall TP/(TP+FN).

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iconoread/geometry.hpp"
#include "iconoread/reading.hpp"

namespace iconoread {

struct TruthSaint {
  std::string saint;
  std::optional<BoundingBox> box;
};

struct GroundTruthRecord {
  std::string image_id;
  std::vector<TruthSaint> saints;
};

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

using CountsBySaint = std::map<std::string, ConfusionCounts, std::less<>>;

/// nullopt when TP + FP == 0.
std::optional<double> Precision(const ConfusionCounts& c);
/// nullopt when TP + FN == 0.
std::optional<double> Recall(const ConfusionCounts& c);

/// Greedy matching of predicted saints (highest attribute confidence first)
/// against unmatched truth entries with the same name. A truth entry that
/// carries a box only matches a figure whose centroid lies inside it.
/// A figure carrying the same saint through several attributes counts once.
/// Throws kIdMismatch when the image ids differ.
CountsBySaint MatchReading(const Reading& reading, const GroundTruthRecord& truth);

struct SaintMetrics {
  ConfusionCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
};

struct MetricsReport {
  std::map<std::string, SaintMetrics, std::less<>> per_saint;
  ConfusionCounts total;
  std::optional<double> micro_precision;
  std::optional<double> micro_recall;
};

MetricsReport ReportFromCounts(const CountsBySaint& counts);

/// Sums MatchReading over the corpus. Throws kMissingTruth when a reading
/// has no truth record; truth records without readings are ignored.
MetricsReport EvaluateCorpus(std::span<const Reading> readings,
                             std::span<const GroundTruthRecord> truths);

/// Throws kParse / kSchema, or kValidation for empty or duplicate image ids
/// and for a saint repeated without boxes.
std::vector<GroundTruthRecord> ParseGroundTruth(std::string_view json_text);

// An image the pipeline could not analyze; its truth saints count as FN.
struct ImageErrorRecord {
  std::string image_id;
  std::string error;
  std::string message;
};

std::string MetricsReportToJson(const MetricsReport& report,
                                std::span<const ImageErrorRecord> errors = {});

/// Saints as columns, precision and recall as rows, two decimals.
std::string RenderMetricsTable(const MetricsReport& report);

}  // namespace iconoread
