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

#include "iconoread/providers.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "iconoread/error.hpp"
#include "oracles.hpp"

namespace iconoread {
namespace {

namespace fs = std::filesystem;

const fs::path kData = ICONOREAD_TEST_DATA_DIR;
const fs::path kVerrocchio = kData / "fixtures/verrocchio/baptism_of_christ.png";
const fs::path kBlank = kData / "fixtures/blank/empty_panel.png";
constexpr ImageDims kVerrocchioDims{473, 554};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

Detection Det(std::string label, double conf, BoundingBox box) {
  return Detection{std::move(label), conf, box, std::nullopt};
}

TEST(RunLengthTest, RoundTripsRandomMasks) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const auto m = testing::RandomMask(rng, 40, 0.4);
    EXPECT_EQ(DecodeRuns(m.width(), m.height(), EncodeRuns(m)), m);
  }
}

TEST(RunLengthTest, RejectsBadRuns) {
  EXPECT_EQ(CodeOf([] { DecodeRuns(4, 1, {{{2, 3}}}); }), ErrorCode::kProtocol);
  EXPECT_EQ(CodeOf([] { DecodeRuns(4, 1, {{{-1, 1}}}); }), ErrorCode::kProtocol);
  EXPECT_EQ(CodeOf([] { DecodeRuns(4, 1, {{{0, 2}, {1, 2}}}); }), ErrorCode::kProtocol);
  EXPECT_EQ(CodeOf([] { DecodeRuns(4, 2, {{{0, 1}}}); }), ErrorCode::kProtocol);
}

TEST(ParseProviderResponseTest, ProtocolErrors) {
  for (const char* text : {
           "[1, 2",
           R"({"detections": [], "regions": []})",
           R"({"dims": {"width": 4, "height": 4}, "detections": [{"label": "keys"}], "regions": []})",
           R"({"dims": {"width": 4, "height": 4}, "detections": [], "regions": [{"raw_label": "person", "confidence": 1}]})",
           R"({"dims": {"width": 0, "height": 4}, "detections": [], "regions": []})",
       }) {
    EXPECT_EQ(CodeOf([&] { ParseProviderResponse(text); }), ErrorCode::kProtocol) << text;
  }
}

TEST(ParseProviderResponseTest, RoundTrip) {
  const auto response = FixtureProvider().Query(kVerrocchio);
  EXPECT_EQ(ParseProviderResponse(SerializeProviderResponse(response)), response);
}

TEST(DetectAttributesTest, BlankPanelHasNoDetections) {
  FixtureProvider provider;
  EXPECT_TRUE(DetectAttributes(provider, kBlank, {512, 512}).empty());
  EXPECT_TRUE(SegmentFigures(provider, kBlank, {512, 512}, ClassMap::Default()).empty());
}

TEST(DetectAttributesTest, VerrocchioDetections) {
  FixtureProvider provider;
  const auto dets = DetectAttributes(provider, kVerrocchio, kVerrocchioDims);
  ASSERT_EQ(dets.size(), 2u);
  EXPECT_EQ(dets[0].label, "dove");
  EXPECT_EQ(dets[1].label, "cross");
  for (const auto& d : dets) {
    EXPECT_TRUE(d.box.IsValid());
    EXPECT_GE(d.box.x_min, 0);
    EXPECT_LE(d.box.x_max, kVerrocchioDims.width);
    EXPECT_LE(d.box.y_max, kVerrocchioDims.height);
  }
}

TEST(DetectAttributesTest, OutOfBoundsBoxIsProtocolError) {
  ProviderResponse r{{100, 100}, {Det("keys", 0.9, {10, 10, 120, 50})}, {}};
  EXPECT_EQ(CodeOf([&] { CheckedDetections(r, {100, 100}); }), ErrorCode::kProtocol);
  r.detections[0] = Det("keys", 1.5, {10, 10, 20, 20});
  EXPECT_EQ(CodeOf([&] { CheckedDetections(r, {100, 100}); }), ErrorCode::kProtocol);
  r.detections[0] = Det("Keys!", 0.5, {10, 10, 20, 20});
  EXPECT_EQ(CodeOf([&] { CheckedDetections(r, {100, 100}); }), ErrorCode::kProtocol);
  r.detections[0] = Det("keys", 0.5, {30, 10, 20, 20});
  EXPECT_EQ(CodeOf([&] { CheckedDetections(r, {100, 100}); }), ErrorCode::kProtocol);
}

TEST(DetectAttributesTest, RescalesToRequestedDims) {
  ProviderResponse r{{100, 50}, {Det("keys", 0.9, {10, 10, 30, 40})}, {}};
  const auto dets = CheckedDetections(r, {200, 100});
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_DOUBLE_EQ(dets[0].box.x_min, 20);
  EXPECT_DOUBLE_EQ(dets[0].box.y_max, 80);
}

TEST(SegmentFiguresTest, VerrocchioRegions) {
  FixtureProvider provider;
  const auto regions =
      SegmentFigures(provider, kVerrocchio, kVerrocchioDims, ClassMap::Default());
  ASSERT_EQ(regions.size(), 4u);
  int persons = 0, animals = 0;
  for (const auto& r : regions) {
    persons += r.semantic_class == SemanticClass::kPerson;
    animals += r.semantic_class == SemanticClass::kAnimal;
    EXPECT_EQ(r.mask.width(), kVerrocchioDims.width);
    EXPECT_EQ(r.mask.height(), kVerrocchioDims.height);
    EXPECT_FALSE(r.mask.Empty());
  }
  EXPECT_EQ(persons, 3);
  EXPECT_EQ(animals, 1);
}

TEST(SegmentFiguresTest, MaskDimsMustMatchResponse) {
  ProviderResponse r{{10, 10}, {}, {RawRegion{"person", 0.9, BinaryMask(5, 5)}}};
  EXPECT_EQ(CodeOf([&] { CheckedRegions(r, {10, 10}, ClassMap::Default()); }),
            ErrorCode::kProtocol);
}

TEST(ClassMapTest, DefaultAndOverrides) {
  auto map = ClassMap::Default();
  EXPECT_EQ(map.Classify("person"), SemanticClass::kPerson);
  EXPECT_EQ(map.Classify("sheep"), SemanticClass::kAnimal);
  EXPECT_EQ(map.Classify("bird"), SemanticClass::kAnimal);
  EXPECT_EQ(map.Classify("chair"), SemanticClass::kOther);
  map.Set("chair", SemanticClass::kPerson);
  EXPECT_EQ(map.Classify("chair"), SemanticClass::kPerson);
  EXPECT_EQ(ParseSemanticClass("ANIMAL"), SemanticClass::kAnimal);
  EXPECT_FALSE(ParseSemanticClass("animal").has_value());
}

TEST(RetainAttributesTest, Examples) {
  std::vector<Detection> dets{Det("dove", 0.97, {0, 0, 2, 2}),
                              Det("cross", 0.41, {4, 4, 6, 6})};
  auto kept = RetainAttributes(dets, 0.9, 4);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].label, "dove");
  EXPECT_DOUBLE_EQ(kept[0].location.x, 1.0);

  dets = {Det("a", 0.95, {0, 0, 1, 1}), Det("b", 0.99, {0, 0, 1, 1}),
          Det("c", 0.92, {0, 0, 1, 1}), Det("d", 0.97, {0, 0, 1, 1}),
          Det("e", 0.91, {0, 0, 1, 1})};
  kept = RetainAttributes(dets, 0.9, 4);
  ASSERT_EQ(kept.size(), 4u);
  EXPECT_EQ(kept[0].label, "b");
  EXPECT_EQ(kept[1].label, "d");
  EXPECT_EQ(kept[2].label, "a");
  EXPECT_EQ(kept[3].label, "c");

  dets = {Det("b", 0.95, {0, 0, 2, 2}), Det("a", 0.95, {0, 0, 2, 2})};
  kept = RetainAttributes(dets, 0.9, 1);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].label, "a");

  EXPECT_TRUE(RetainAttributes(std::vector<Detection>{}, 0.9, 4).empty());
  EXPECT_EQ(RetainAttributes(std::vector<Detection>{Det("a", 0.9, {0, 0, 1, 1})}, 0.9, 4).size(),
            1u);
}

TEST(RetainAttributesTest, RejectsBadArguments) {
  EXPECT_EQ(CodeOf([] { RetainAttributes(std::vector<Detection>{}, 1.1, 4); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { RetainAttributes(std::vector<Detection>{}, 0.5, 0); }),
            ErrorCode::kInvalidArgument);
}

TEST(RetainAttributesTest, MaskCentroidLocation) {
  BinaryMask m(10, 10);
  m.FillRect(0, 0, 2, 2);
  std::vector<Detection> dets{Detection{"keys", 0.95, {0, 0, 10, 10}, m}};
  const auto kept = RetainAttributes(dets, 0.9, 4, LocationMode::kMaskCentroid);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_DOUBLE_EQ(kept[0].location.x, 1.0);
  EXPECT_DOUBLE_EQ(kept[0].location.y, 1.0);
}

TEST(RetainAttributesTest, Properties) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> conf(0.0, 1.0), coord(0.0, 100.0);
  std::uniform_int_distribution<int> count(0, 12), max(1, 6), label(0, 3);
  const char* labels[] = {"keys", "dove", "cross", "eagle"};
  for (int i = 0; i < 1000; ++i) {
    std::vector<Detection> dets;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
      // Coarse confidences to exercise ties.
      const double c = std::round(conf(rng) * 20) / 20;
      const double x = coord(rng), y = coord(rng);
      dets.push_back(Det(labels[label(rng)], c, {x, y, x + 1, y + 1}));
    }
    const double threshold = std::round(conf(rng) * 20) / 20;
    const int m = max(rng);
    const auto kept = RetainAttributes(dets, threshold, m);

    const auto eligible = std::count_if(dets.begin(), dets.end(),
                                        [&](const auto& d) { return d.confidence >= threshold; });
    ASSERT_EQ(kept.size(), static_cast<std::size_t>(std::min<long>(eligible, m)));
    for (std::size_t k = 0; k < kept.size(); ++k) {
      ASSERT_GE(kept[k].confidence, threshold);
      if (k > 0) {
        ASSERT_GE(kept[k - 1].confidence, kept[k].confidence);
      }
    }
    // Nothing dropped outranks anything kept.
    if (!kept.empty()) {
      const double lowest = kept.back().confidence;
      const auto higher = std::count_if(dets.begin(), dets.end(),
                                        [&](const auto& d) { return d.confidence > lowest; });
      ASSERT_LE(static_cast<std::size_t>(higher), kept.size());
    }
    ASSERT_EQ(RetainAttributes(kept, threshold, m), kept);
  }
}

TEST(FixtureProviderTest, DeterministicAndReportsMissingSidecar) {
  FixtureProvider provider;
  EXPECT_EQ(provider.Query(kVerrocchio), provider.Query(kVerrocchio));
  EXPECT_EQ(FixtureProvider::SidecarFor("a/b/painting.png"),
            fs::path("a/b/painting.detections.json"));
  EXPECT_EQ(CodeOf([&] { provider.Query(kData / "no_such_image.png"); }),
            ErrorCode::kProviderUnavailable);
}

class SubprocessProviderTest : public ::testing::Test {
 protected:
  void TearDown() override { unsetenv("ECHO_PROVIDER_MODE"); }
};

TEST_F(SubprocessProviderTest, MatchesFixtureOverTheWire) {
  SubprocessProvider provider(ICONOREAD_ECHO_PROVIDER);
  for (const auto& image : {kVerrocchio, kBlank}) {
    EXPECT_EQ(provider.Query(image), FixtureProvider().Query(image));
  }
  const auto wire = DetectAttributes(provider, kVerrocchio, kVerrocchioDims);
  FixtureProvider fixture;
  EXPECT_EQ(wire, DetectAttributes(fixture, kVerrocchio, kVerrocchioDims));
}

TEST_F(SubprocessProviderTest, Failures) {
  EXPECT_EQ(CodeOf([] { SubprocessProvider("/nonexistent/backend").Query(kVerrocchio); }),
            ErrorCode::kProviderUnavailable);
  EXPECT_EQ(CodeOf([] { SubprocessProvider(ICONOREAD_ECHO_PROVIDER).Query(kData / "missing.png"); }),
            ErrorCode::kImageUnreadable);
  setenv("ECHO_PROVIDER_MODE", "fail", 1);
  EXPECT_EQ(CodeOf([] { SubprocessProvider(ICONOREAD_ECHO_PROVIDER).Query(kVerrocchio); }),
            ErrorCode::kProtocol);
  setenv("ECHO_PROVIDER_MODE", "garbage", 1);
  EXPECT_EQ(CodeOf([] { SubprocessProvider(ICONOREAD_ECHO_PROVIDER).Query(kVerrocchio); }),
            ErrorCode::kProtocol);
  setenv("ECHO_PROVIDER_MODE", "silent", 1);
  EXPECT_EQ(CodeOf([] { SubprocessProvider(ICONOREAD_ECHO_PROVIDER).Query(kVerrocchio); }),
            ErrorCode::kProtocol);
}

}  // namespace
}  // namespace iconoread
