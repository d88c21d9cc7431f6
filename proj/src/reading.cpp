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

#include "iconoread/reading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "iconoread/error.hpp"

namespace iconoread {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t Find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void Join(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Lower bound on the distance between set pixels of two tight boxes.
double BoxGap(const BoundingBox& a, const BoundingBox& b) {
  // Boxes use pixel edges; pixel centers sit half a pixel inside.
  const double dx = std::max({0.0, a.x_min - b.x_max + 1.0, b.x_min - a.x_max + 1.0});
  const double dy = std::max({0.0, a.y_min - b.y_max + 1.0, b.y_min - a.y_max + 1.0});
  return std::hypot(dx, dy);
}

bool Groups(const BinaryMask& a, const BoundingBox& box_a, const BinaryMask& b,
            const BoundingBox& box_b, double merge_distance) {
  if (merge_distance <= 0.0) return MasksOverlap(a, b);
  if (BoxGap(box_a, box_b) > merge_distance) return false;
  const auto d = MaskDistance(a, b);
  return d && *d <= merge_distance;
}

}  // namespace

std::vector<Figure> BuildFigures(std::span<const SegmentRegion> regions,
                                 double merge_distance) {
  for (const auto& r : regions) {
    if (r.mask.dims() != regions.front().mask.dims()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "segmentation masks have differing dims");
    }
  }

  std::vector<std::size_t> members;
  std::vector<BoundingBox> boxes;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].semantic_class == SemanticClass::kOther) continue;
    auto box = regions[i].mask.TightBox();
    if (!box) continue;
    members.push_back(i);
    boxes.push_back(*box);
  }

  DisjointSets sets(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (sets.Find(i) == sets.Find(j)) continue;
      if (Groups(regions[members[i]].mask, boxes[i], regions[members[j]].mask,
                 boxes[j], merge_distance)) {
        sets.Join(i, j);
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < members.size(); ++i) {
    groups[sets.Find(i)].push_back(members[i]);
  }

  std::vector<Figure> figures;
  figures.reserve(groups.size());
  for (auto& [root, indices] : groups) {
    std::vector<BinaryMask> masks;
    masks.reserve(indices.size());
    for (auto idx : indices) masks.push_back(regions[idx].mask);
    Figure f;
    f.member_region_indices = std::move(indices);
    f.merged_mask = UnionMasks(masks);
    f.centroid = Centroid(f.merged_mask);
    figures.push_back(std::move(f));
  }
  std::sort(figures.begin(), figures.end(), [](const Figure& a, const Figure& b) {
    return std::tie(a.centroid.x, a.centroid.y, a.member_region_indices) <
           std::tie(b.centroid.x, b.centroid.y, b.member_region_indices);
  });
  for (std::size_t i = 0; i < figures.size(); ++i) {
    figures[i].id = static_cast<int>(i);
  }
  return figures;
}

Reading AssignActors(std::span<const Figure> figures,
                     std::span<const AttributeInstance> attributes,
                     const AssociationDatabase& db) {
  Reading reading;
  reading.figures.assign(figures.begin(), figures.end());
  std::sort(reading.figures.begin(), reading.figures.end(),
            [](const Figure& a, const Figure& b) { return a.id < b.id; });

  reading.attributes.assign(attributes.begin(), attributes.end());
  std::stable_sort(
      reading.attributes.begin(), reading.attributes.end(),
      [&db](const AttributeInstance& a, const AttributeInstance& b) {
        const auto na = db.SaintsFor(a.label).size();
        const auto nb = db.SaintsFor(b.label).size();
        return std::make_tuple(-a.confidence, na, std::cref(a.label),
                               a.location.x, a.location.y) <
               std::make_tuple(-b.confidence, nb, std::cref(b.label),
                               b.location.x, b.location.y);
      });

  // saint -> figure ids it has been placed on so far
  std::map<std::string, std::vector<int>, std::less<>> placed;

  for (std::size_t ai = 0; ai < reading.attributes.size(); ++ai) {
    const AttributeInstance& attr = reading.attributes[ai];
    const auto candidates = db.SaintsFor(attr.label);
    if (candidates.empty()) {
      reading.unassigned_attributes.push_back(attr);
      reading.warnings.push_back("attribute \"" + attr.label +
                                 "\" is not in the association database");
      continue;
    }
    if (reading.figures.empty()) {
      reading.unassigned_attributes.push_back(attr);
      continue;
    }

    const Figure* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : reading.figures) {
      const double d = Distance(f.centroid, attr.location);
      // Figures are sorted by id, so strict < keeps the lower id on ties.
      if (d < best) {
        best = d;
        nearest = &f;
      }
    }

    auto taken_elsewhere = [&](const std::string& saint) {
      auto it = placed.find(saint);
      if (it == placed.end()) return false;
      const auto& ids = it->second;
      if (std::find(ids.begin(), ids.end(), nearest->id) != ids.end()) return false;
      return !ids.empty();
    };
    std::size_t rank = 0;
    while (rank < candidates.size() && taken_elsewhere(candidates[rank].saint)) {
      ++rank;
    }
    if (rank == candidates.size()) {
      rank = 0;
      reading.warnings.push_back(
          "saint \"" + candidates[0].saint + "\" assigned to more than one " +
          "figure (attribute \"" + attr.label + "\" had no free candidate)");
    }
    const std::string& saint = candidates[rank].saint;
    placed[saint].push_back(nearest->id);
    reading.assignments.push_back({nearest->id, saint, attr.label, ai,
                                   attr.confidence, best,
                                   static_cast<int>(rank) + 1});
  }
  return reading;
}

}  // namespace iconoread
