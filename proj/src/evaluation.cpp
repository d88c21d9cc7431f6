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

#include "iconoread/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "iconoread/error.hpp"

namespace iconoread {
namespace {

using nlohmann::json;

struct Prediction {
  std::string saint;
  double confidence;
  int figure_id;
  PixelPoint centroid;
};

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string FormatMetric(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v);
  return buf;
}

[[noreturn]] void Schema(const std::string& msg) {
  throw Error(ErrorCode::kSchema, "ground truth: " + msg);
}

}  // namespace

std::optional<double> Precision(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

std::optional<double> Recall(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

CountsBySaint MatchReading(const Reading& reading,
                           const GroundTruthRecord& truth) {
  if (reading.image_id != truth.image_id) {
    throw Error(ErrorCode::kIdMismatch, "reading \"" + reading.image_id +
                                            "\" scored against truth \"" +
                                            truth.image_id + "\"");
  }

  std::map<int, PixelPoint> centroids;
  for (const auto& f : reading.figures) centroids[f.id] = f.centroid;

  // One prediction per (figure, saint), keeping the strongest attribute.
  std::map<std::pair<int, std::string>, double> strongest;
  for (const auto& a : reading.assignments) {
    auto [it, inserted] =
        strongest.try_emplace({a.figure_id, a.saint}, a.attribute_confidence);
    if (!inserted) it->second = std::max(it->second, a.attribute_confidence);
  }
  std::vector<Prediction> predictions;
  for (const auto& [key, confidence] : strongest) {
    const auto c = centroids.find(key.first);
    predictions.push_back({key.second, confidence, key.first,
                           c == centroids.end() ? PixelPoint{} : c->second});
  }
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const Prediction& a, const Prediction& b) {
                     return a.confidence > b.confidence;
                   });

  CountsBySaint counts;
  std::vector<bool> matched(truth.saints.size(), false);
  for (const auto& p : predictions) {
    bool hit = false;
    for (std::size_t t = 0; t < truth.saints.size(); ++t) {
      const auto& ts = truth.saints[t];
      if (matched[t] || ts.saint != p.saint) continue;
      if (ts.box && !ts.box->Contains(p.centroid)) continue;
      matched[t] = true;
      hit = true;
      break;
    }
    auto& c = counts[p.saint];
    (hit ? c.tp : c.fp) += 1;
  }
  for (std::size_t t = 0; t < truth.saints.size(); ++t) {
    if (!matched[t]) counts[truth.saints[t].saint].fn += 1;
  }
  return counts;
}

MetricsReport ReportFromCounts(const CountsBySaint& counts) {
  MetricsReport report;
  for (const auto& [saint, c] : counts) {
    report.per_saint[saint] = {c, Precision(c), Recall(c)};
    report.total += c;
  }
  report.micro_precision = Precision(report.total);
  report.micro_recall = Recall(report.total);
  return report;
}

MetricsReport EvaluateCorpus(std::span<const Reading> readings,
                             std::span<const GroundTruthRecord> truths) {
  std::map<std::string_view, const GroundTruthRecord*> by_id;
  for (const auto& t : truths) by_id[t.image_id] = &t;

  CountsBySaint totals;
  for (const auto& r : readings) {
    auto it = by_id.find(r.image_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kMissingTruth,
                  "no ground truth for image \"" + r.image_id + "\"");
    }
    for (const auto& [saint, c] : MatchReading(r, *it->second)) {
      totals[saint] += c;
    }
  }
  return ReportFromCounts(totals);
}

std::vector<GroundTruthRecord> ParseGroundTruth(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("ground truth: ") + e.what());
  }
  if (!root.is_array()) Schema("document must be an array");

  std::vector<GroundTruthRecord> records;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const json& item = root[i];
    const std::string where = "[" + std::to_string(i) + "]";
    if (!item.is_object() || !item.contains("image_id") ||
        !item["image_id"].is_string()) {
      Schema(where + " needs a string image_id");
    }
    if (!item.contains("saints") || !item["saints"].is_array()) {
      Schema(where + " needs a saints array");
    }
    GroundTruthRecord rec;
    rec.image_id = item["image_id"].get<std::string>();
    if (rec.image_id.empty()) {
      throw Error(ErrorCode::kValidation, "ground truth" + where + " has an empty image_id");
    }
    if (!ids.insert(rec.image_id).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate ground truth for \"" + rec.image_id + "\"");
    }
    std::map<std::string, std::pair<int, bool>> seen;  // count, all boxed
    for (const auto& s : item["saints"]) {
      if (!s.is_object() || !s.contains("saint") || !s["saint"].is_string()) {
        Schema(where + " saints need a string saint");
      }
      TruthSaint ts;
      ts.saint = s["saint"].get<std::string>();
      if (auto b = s.find("box"); b != s.end() && !b->is_null()) {
        if (!b->is_array() || b->size() != 4 ||
            !std::all_of(b->begin(), b->end(),
                         [](const json& v) { return v.is_number(); })) {
          Schema(where + " box must be four numbers");
        }
        ts.box = BoundingBox{(*b)[0].get<double>(), (*b)[1].get<double>(),
                             (*b)[2].get<double>(), (*b)[3].get<double>()};
        if (!ts.box->IsValid()) {
          throw Error(ErrorCode::kValidation,
                      "ground truth" + where + " has an invalid box");
        }
      }
      auto& [count, boxed] = seen.try_emplace(ts.saint, 0, true).first->second;
      ++count;
      boxed = boxed && ts.box.has_value();
      if (count > 1 && !boxed) {
        throw Error(ErrorCode::kValidation,
                    "ground truth for \"" + rec.image_id + "\" repeats \"" +
                        ts.saint + "\" without boxes");
      }
      rec.saints.push_back(std::move(ts));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string MetricsReportToJson(const MetricsReport& report,
                                std::span<const ImageErrorRecord> errors) {
  json per_saint = json::array();
  for (const auto& [saint, m] : report.per_saint) {
    per_saint.push_back({{"saint", saint},
                         {"tp", m.counts.tp},
                         {"fp", m.counts.fp},
                         {"fn", m.counts.fn},
                         {"precision", OptionalNumber(m.precision)},
                         {"recall", OptionalNumber(m.recall)}});
  }
  std::vector<ImageErrorRecord> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.image_id, a.error, a.message) <
           std::tie(b.image_id, b.error, b.message);
  });
  json error_list = json::array();
  for (const auto& e : sorted) {
    error_list.push_back(
        {{"image_id", e.image_id}, {"error", e.error}, {"message", e.message}});
  }
  json root = {{"per_saint", per_saint},
               {"micro",
                {{"tp", report.total.tp},
                 {"fp", report.total.fp},
                 {"fn", report.total.fn},
                 {"precision", OptionalNumber(report.micro_precision)},
                 {"recall", OptionalNumber(report.micro_recall)}}},
               {"errors", error_list}};
  return root.dump(2) + "\n";
}

std::string RenderMetricsTable(const MetricsReport& report) {
  std::vector<std::string> header{""};
  std::vector<std::string> precision{"Precision"};
  std::vector<std::string> recall{"Recall"};
  for (const auto& [saint, m] : report.per_saint) {
    header.push_back(saint);
    precision.push_back(FormatMetric(m.precision));
    recall.push_back(FormatMetric(m.recall));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    width[i] = std::max({header[i].size(), precision[i].size(), recall[i].size()});
  }
  auto row = [&](const std::vector<std::string>& cells) {
    std::string line = "|";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t pad = width[i] - cells[i].size();
      line += " " + cells[i] + std::string(pad, ' ') + " |";
    }
    return line + "\n";
  };
  std::string rule = "+";
  for (auto w : width) rule += std::string(w + 2, '-') + "+";
  rule += "\n";

  std::ostringstream out;
  out << rule << row(header) << rule << row(precision) << row(recall) << rule;
  out << "micro precision " << FormatMetric(report.micro_precision)
      << ", micro recall " << FormatMetric(report.micro_recall) << "\n";
  return out.str();
}

}  // namespace iconoread
