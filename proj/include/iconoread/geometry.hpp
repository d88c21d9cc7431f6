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

// Geometric substrate: pixel points, boxes, binary masks and the handful of
// operations the pipeline needs on them. Coordinates use a top-left origin
// with x rightward and y downward; the center of pixel (i, j) is at
// (i + 0.5, j + 0.5).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace iconoread {

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool IsValid() const;
  // Closed-interval containment.
  bool Contains(const PixelPoint& p) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ImageDims {
  int width = 0;
  int height = 0;

  bool IsValid() const { return width >= 1 && height >= 1; }
  std::int64_t PixelCount() const {
    return static_cast<std::int64_t>(width) * height;
  }

  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Row-major boolean grid. Width and height are always >= 1.
class BinaryMask {
 public:
  /// All-clear mask. Throws kInvalidArgument on non-positive dims.
  BinaryMask(int width, int height);
  explicit BinaryMask(ImageDims dims) : BinaryMask(dims.width, dims.height) {}
  /// Throws kInvalidArgument unless bits.size() == width * height.
  BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  ImageDims dims() const { return {width_, height_}; }

  bool Get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void Set(int x, int y, bool value = true) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = value ? 1 : 0;
  }
  // Sets the half-open pixel rectangle [x0, x1) x [y0, y1), clipped to the mask.
  void FillRect(int x0, int y0, int x1, int y1);

  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t CountSet() const;
  bool Empty() const { return CountSet() == 0; }
  /// Pixel-edge bounding box of the set bits; nullopt for an empty mask.
  std::optional<BoundingBox> TightBox() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

/// Mean of the pixel centers of all set bits. Throws kEmptyMask.
PixelPoint Centroid(const BinaryMask& mask);

PixelPoint BoxCenter(const BoundingBox& box);

double Distance(const PixelPoint& a, const PixelPoint& b);

/// Bitwise OR. Throws kInvalidArgument on an empty list and
/// kDimensionMismatch when dims differ.
BinaryMask UnionMasks(std::span<const BinaryMask> masks);

/// True when the two masks share at least one set pixel.
/// Throws kDimensionMismatch.
bool MasksOverlap(const BinaryMask& a, const BinaryMask& b);

/// Smallest Euclidean distance between set-pixel centers of the two masks
/// (0 when they overlap); nullopt when either mask is empty.
/// Throws kDimensionMismatch.
std::optional<double> MaskDistance(const BinaryMask& a, const BinaryMask& b);

struct ScaledDims {
  double scale = 1.0;
  ImageDims dims;
};

/// Uniform scale taking dims to approximately target_pixels total pixels.
/// Each axis is rounded half-to-even with a floor of one pixel.
/// Throws kInvalidArgument when target_pixels < 1 or dims are invalid.
ScaledDims NormalizeScale(ImageDims dims, std::int64_t target_pixels);

// Nearest-neighbor resampling to new dims, sampling at pixel centers.
BinaryMask ResampleMask(const BinaryMask& mask, ImageDims dims);

BoundingBox ScaleBox(const BoundingBox& box, double sx, double sy);

}  // namespace iconoread
