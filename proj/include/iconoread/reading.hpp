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

// From segmentation regions and retained attributes to a "reading" of one
// painting: candidate figures and the saint each attribute identifies.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "iconoread/geometry.hpp"
#include "iconoread/knowledge.hpp"
#include "iconoread/providers.hpp"

namespace iconoread {

struct Figure {
  int id = 0;
  std::vector<std::size_t> member_region_indices;
  BinaryMask merged_mask{1, 1};
  PixelPoint centroid;
};

struct Assignment {
  int figure_id = 0;
  std::string saint;
  std::string via_attribute;
  // Index into Reading::attributes.
  std::size_t attribute_index = 0;
  double attribute_confidence = 0.0;
  double distance = 0.0;
  int candidate_rank = 1;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Reading {
  std::string image_id;
  std::vector<Figure> figures;
  // Retained attributes in processing order.
  std::vector<AttributeInstance> attributes;
  std::vector<Assignment> assignments;
  std::vector<AttributeInstance> unassigned_attributes;
  std::vector<std::string> warnings;
};

/// Groups PERSON and ANIMAL regions whose masks overlap or come within
/// merge_distance pixels of each other, unions each group and numbers the
/// resulting figures by ascending centroid (x, then y). OTHER regions and
/// empty masks are dropped. Throws kDimensionMismatch.
std::vector<Figure> BuildFigures(std::span<const SegmentRegion> regions,
                                 double merge_distance);

/// Each attribute claims the figure whose centroid is nearest to it (ties go
/// to the lower figure id). Attributes are processed by confidence, then by
/// how few candidate saints they carry, then label and position. A saint
/// already placed on a different figure by an earlier attribute is skipped
/// in favor of the next candidate; when every candidate is taken the top
/// one is kept and a warning is recorded. Attributes with no known
/// candidates, or with no figures to claim, are reported as unassigned.
Reading AssignActors(std::span<const Figure> figures,
                     std::span<const AttributeInstance> attributes,
                     const AssociationDatabase& db);

}  // namespace iconoread
