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
#include <functional>
#include <random>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "iconoread/error.hpp"
#include "oracles.hpp"

namespace iconoread {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

struct Pred {
  int figure;
  std::string saint;
  double confidence;
};

// A reading with one figure per distinct id, figure i centred at (10 i + 5, 5).
Reading MakeReading(std::string id, const std::vector<Pred>& preds, int n_figures = 0) {
  Reading r;
  r.image_id = std::move(id);
  for (const auto& p : preds) n_figures = std::max(n_figures, p.figure + 1);
  for (int i = 0; i < n_figures; ++i) {
    Figure f;
    f.id = i;
    f.centroid = {10.0 * i + 5, 5};
    r.figures.push_back(f);
  }
  std::size_t k = 0;
  for (const auto& p : preds) {
    r.assignments.push_back({p.figure, p.saint, "attr", k++, p.confidence, 1.0, 1});
  }
  return r;
}

ConfusionCounts C(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  return ConfusionCounts{tp, fp, fn};
}

TEST(MatchReadingTest, CorrectIdentification) {
  const auto counts = MatchReading(MakeReading("baptism", {{1, "Christ", 0.99}}),
                                   {"baptism", {{"Christ", {}}}});
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.at("Christ"), C(1, 0, 0));
}

TEST(MatchReadingTest, MissedSaintIsFalseNegative) {
  const auto counts = MatchReading(MakeReading("peter", {}, 2),
                                   {"peter", {{"Saint Peter", {}}}});
  EXPECT_EQ(counts.at("Saint Peter"), C(0, 0, 1));
}

TEST(MatchReadingTest, DuplicatePredictionOnTwoFigures) {
  const auto counts = MatchReading(
      MakeReading("mark", {{0, "Saint Mark", 0.9}, {1, "Saint Mark", 0.95}}),
      {"mark", {{"Saint Mark", {}}}});
  EXPECT_EQ(counts.at("Saint Mark"), C(1, 1, 0));
}

TEST(MatchReadingTest, SameFigureSameSaintCountsOnce) {
  const auto counts = MatchReading(
      MakeReading("x", {{0, "Saint John", 0.9}, {0, "Saint John", 0.95}}),
      {"x", {{"Saint John", {}}}});
  EXPECT_EQ(counts.at("Saint John"), C(1, 0, 0));
}

TEST(MatchReadingTest, BoxesConstrainTheMatch) {
  const auto reading = MakeReading("x", {{0, "Saint John", 0.99}, {2, "Saint John", 0.9}});
  GroundTruthRecord truth{"x", {{"Saint John", BoundingBox{20, 0, 30, 10}}}};
  EXPECT_EQ(MatchReading(reading, truth).at("Saint John"), C(1, 1, 0));
  truth.saints[0].box = BoundingBox{40, 0, 50, 10};
  EXPECT_EQ(MatchReading(reading, truth).at("Saint John"), C(0, 2, 1));
}

TEST(MatchReadingTest, IdMismatch) {
  EXPECT_EQ(CodeOf([] { MatchReading(MakeReading("a", {}), {"b", {}}); }),
            ErrorCode::kIdMismatch);
}

TEST(MetricsTest, PrecisionRecallExamples) {
  EXPECT_DOUBLE_EQ(*Precision(C(2, 1, 0)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*Recall(C(2, 1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(*Precision(C(3, 0, 1)), 1.0);
  EXPECT_DOUBLE_EQ(*Recall(C(3, 0, 1)), 0.75);
  EXPECT_FALSE(Precision(C(0, 0, 3)).has_value());
  EXPECT_DOUBLE_EQ(*Recall(C(0, 0, 3)), 0.0);
  EXPECT_FALSE(Recall(C(0, 2, 0)).has_value());
}

TEST(MetricsTest, IdentitiesOnSmallCounts) {
  for (int tp = 0; tp <= 5; ++tp)
    for (int fp = 0; fp <= 5; ++fp)
      for (int fn = 0; fn <= 5; ++fn) {
        const auto c = C(tp, fp, fn);
        const auto p = Precision(c), r = Recall(c);
        ASSERT_EQ(p.has_value(), tp + fp > 0);
        ASSERT_EQ(r.has_value(), tp + fn > 0);
        if (p) {
          ASSERT_GE(*p, 0.0);
          ASSERT_LE(*p, 1.0);
          ASSERT_DOUBLE_EQ(*p * (tp + fp), tp);
        }
        if (r) {
          ASSERT_DOUBLE_EQ(*r * (tp + fn), tp);
        }
      }
}

std::vector<Reading> CorpusReadings() {
  return {
      MakeReading("holy_trinity_a", {{0, "God", 0.97}}),
      MakeReading("holy_trinity_b", {{0, "God", 0.95}}),
      MakeReading("st_mark_writing", {{0, "Saint Mark", 0.96}}),
      MakeReading("lion_of_st_mark", {{0, "Saint Mark", 0.99}}),
      MakeReading("st_peter_misread", {{0, "Saint Mark", 0.93}}),
      MakeReading("st_john_patmos", {{0, "Saint John", 0.98}}),
      MakeReading("st_john_evangelist", {{0, "Saint John", 0.94}}),
      MakeReading("st_john_altarpiece", {{2, "Saint John", 0.95}}),
      MakeReading("st_john_faded", {}, 1),
      MakeReading("st_peter_keys", {{1, "Saint Peter", 0.99}}),
  };
}

std::vector<GroundTruthRecord> CorpusTruth() {
  return {
      {"holy_trinity_a", {{"God", {}}}},
      {"holy_trinity_b", {{"God", {}}}},
      {"st_mark_writing", {{"Saint Mark", {}}}},
      {"lion_of_st_mark", {{"Saint Mark", {}}}},
      {"st_peter_misread", {{"Saint Peter", {}}}},
      {"st_john_patmos", {{"Saint John", {}}}},
      {"st_john_evangelist", {{"Saint John", {}}}},
      {"st_john_altarpiece", {{"Saint John", BoundingBox{20, 0, 30, 10}}}},
      {"st_john_faded", {{"Saint John", {}}}},
      {"st_peter_keys", {{"Saint Peter", BoundingBox{10, 0, 20, 10}}}},
  };
}

TEST(EvaluateCorpusTest, TableCounts) {
  const auto report = EvaluateCorpus(CorpusReadings(), CorpusTruth());
  ASSERT_EQ(report.per_saint.size(), 4u);
  EXPECT_EQ(report.per_saint.at("God").counts, C(2, 0, 0));
  EXPECT_EQ(report.per_saint.at("Saint Mark").counts, C(2, 1, 0));
  EXPECT_EQ(report.per_saint.at("Saint John").counts, C(3, 0, 1));
  EXPECT_EQ(report.per_saint.at("Saint Peter").counts, C(1, 0, 1));
  EXPECT_EQ(report.total, C(8, 1, 2));
  EXPECT_DOUBLE_EQ(*report.micro_precision, 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(*report.micro_recall, 0.8);

  const auto table = RenderMetricsTable(report);
  EXPECT_NE(table.find("| Precision | 1.00 | 1.00       | 0.67       | 1.00        |"),
            std::string::npos)
      << table;
  EXPECT_NE(table.find("| Recall    | 1.00 | 0.75       | 1.00       | 0.50        |"),
            std::string::npos)
      << table;
}

TEST(EvaluateCorpusTest, EmptyCorpus) {
  const auto report = EvaluateCorpus({}, {});
  EXPECT_TRUE(report.per_saint.empty());
  EXPECT_EQ(report.total, C(0, 0, 0));
  EXPECT_FALSE(report.micro_precision.has_value());
  const auto j = nlohmann::json::parse(MetricsReportToJson(report));
  EXPECT_TRUE(j["per_saint"].empty());
  EXPECT_TRUE(j["micro"]["precision"].is_null());
  EXPECT_NE(RenderMetricsTable(report).find("n/a"), std::string::npos);
}

TEST(EvaluateCorpusTest, MissingTruth) {
  auto truth = CorpusTruth();
  truth.pop_back();
  EXPECT_EQ(CodeOf([&] { EvaluateCorpus(CorpusReadings(), truth); }),
            ErrorCode::kMissingTruth);
  // Extra truth records are fine.
  auto readings = CorpusReadings();
  readings.pop_back();
  EXPECT_NO_THROW(EvaluateCorpus(readings, CorpusTruth()));
}

TEST(EvaluateCorpusTest, InvariantUnderCorpusPermutation) {
  auto readings = CorpusReadings();
  auto truth = CorpusTruth();
  const auto base = MetricsReportToJson(EvaluateCorpus(readings, truth));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    std::shuffle(readings.begin(), readings.end(), rng);
    std::shuffle(truth.begin(), truth.end(), rng);
    ASSERT_EQ(MetricsReportToJson(EvaluateCorpus(readings, truth)), base);
  }
}

TEST(EvaluateCorpusTest, MonotoneInFalsePositivesAndNegatives) {
  const auto base = EvaluateCorpus(CorpusReadings(), CorpusTruth());
  // Extra wrong prediction: precision can only fall, recall unchanged.
  auto readings = CorpusReadings();
  readings[0] = MakeReading("holy_trinity_a", {{0, "God", 0.97}, {1, "Saint Mark", 0.5}});
  const auto more_fp = EvaluateCorpus(readings, CorpusTruth());
  EXPECT_LT(*more_fp.per_saint.at("Saint Mark").precision,
            *base.per_saint.at("Saint Mark").precision);
  EXPECT_EQ(more_fp.per_saint.at("Saint Mark").recall, base.per_saint.at("Saint Mark").recall);
  // Extra unmatched truth: recall can only fall, precision unchanged.
  auto truth = CorpusTruth();
  truth[2].saints.push_back({"Saint Mark", BoundingBox{100, 100, 110, 110}});
  const auto more_fn = EvaluateCorpus(CorpusReadings(), truth);
  EXPECT_LT(*more_fn.per_saint.at("Saint Mark").recall,
            *base.per_saint.at("Saint Mark").recall);
  EXPECT_EQ(more_fn.per_saint.at("Saint Mark").precision,
            base.per_saint.at("Saint Mark").precision);
}

TEST(MatchReadingTest, AgreesWithExhaustiveMatching) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> n(0, 3), fig(0, 3), saint(0, 1), coin(0, 1);
  std::uniform_real_distribution<double> conf(0.5, 1.0);
  const char* names[] = {"Saint John", "Saint Mark"};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Pred> preds;
    const int np = n(rng);
    for (int i = 0; i < np; ++i) preds.push_back({fig(rng), names[saint(rng)], conf(rng)});
    GroundTruthRecord truth{"x", {}};
    const bool boxed = trial % 2;
    const int nt = n(rng);
    for (int i = 0; i < nt; ++i) {
      std::optional<BoundingBox> box;
      if (boxed && coin(rng)) {
        const int f = fig(rng);
        box = BoundingBox{10.0 * f, 0, 10.0 * f + 10 + 10 * coin(rng), 10};
      }
      truth.saints.push_back({names[saint(rng)], box});
    }
    const auto reading = MakeReading("x", preds, 4);

    // Oracle over distinct (figure, saint) predictions.
    std::vector<std::pair<int, std::string>> distinct;
    for (const auto& p : preds) distinct.emplace_back(p.figure, p.saint);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto compatible = [&](std::size_t p, std::size_t t) {
      const auto& ts = truth.saints[t];
      if (ts.saint != distinct[p].second) return false;
      return !ts.box || ts.box->Contains(reading.figures[distinct[p].first].centroid);
    };
    const int best = testing::MaxMatching(distinct.size(), truth.saints.size(), compatible);

    ConfusionCounts total;
    for (const auto& [s, c] : MatchReading(reading, truth)) total += c;
    ASSERT_EQ(total.tp + total.fp, static_cast<std::int64_t>(distinct.size()));
    ASSERT_EQ(total.tp + total.fn, static_cast<std::int64_t>(truth.saints.size()));
    if (!boxed) {
      ASSERT_EQ(total.tp, best) << "trial " << trial;
    } else {
      // Greedy is a maximal matching: at least half the optimum.
      ASSERT_LE(total.tp, best);
      ASSERT_GE(2 * total.tp, best);
    }
  }
}

TEST(ParseGroundTruthTest, AcceptsAndRejects) {
  const auto records = ParseGroundTruth(R"([
    {"image_id": "a", "saints": [{"saint": "Christ"}]},
    {"image_id": "b", "saints": [{"saint": "Saint John", "box": [1, 2, 3, 4]},
                                 {"saint": "Saint John", "box": [5, 6, 7, 8]}]},
    {"image_id": "c", "saints": []}])");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[1].saints[1].box->x_min, 5);

  EXPECT_EQ(CodeOf([] { ParseGroundTruth("[{"); }), ErrorCode::kParse);
  EXPECT_EQ(CodeOf([] { ParseGroundTruth(R"({"a": 1})"); }), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf([] { ParseGroundTruth(R"([{"image_id": "a"}])"); }), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf([] {
              ParseGroundTruth(R"([{"image_id": "a", "saints": []}, {"image_id": "a", "saints": []}])");
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] { ParseGroundTruth(R"([{"image_id": "", "saints": []}])"); }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] {
              ParseGroundTruth(R"([{"image_id": "a", "saints": [{"saint": "X", "box": [3, 0, 1, 1]}]}])");
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(CodeOf([] {
              ParseGroundTruth(R"([{"image_id": "a", "saints": [{"saint": "X"}, {"saint": "X"}]}])");
            }),
            ErrorCode::kValidation);
}

TEST(MetricsReportToJsonTest, Shape) {
  const auto report = EvaluateCorpus(CorpusReadings(), CorpusTruth());
  std::vector<ImageErrorRecord> errors{{"z", "ImageUnreadable", "gone"},
                                       {"a", "ProtocolError", "bad"}};
  const auto j = nlohmann::json::parse(MetricsReportToJson(report, errors));
  ASSERT_EQ(j["per_saint"].size(), 4u);
  EXPECT_EQ(j["per_saint"][0]["saint"], "God");
  EXPECT_EQ(j["micro"]["tp"], 8);
  ASSERT_EQ(j["errors"].size(), 2u);
  EXPECT_EQ(j["errors"][0]["image_id"], "a");
}

}  // namespace
}  // namespace iconoread
