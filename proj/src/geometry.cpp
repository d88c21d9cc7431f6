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

#include "iconoread/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "iconoread/error.hpp"

namespace iconoread {
namespace {

void RequireSameDims(const BinaryMask& a, const BinaryMask& b) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask dims differ: " + std::to_string(a.width()) + "x" +
                    std::to_string(a.height()) + " vs " +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.height()));
  }
}

// One-dimensional squared distance transform (Felzenszwalb & Huttenlocher)
// over a sampled function f; +inf entries carry no parabola.
void DistanceTransform1d(const std::vector<double>& f, std::vector<double>& d,
                         std::vector<int>& v, std::vector<double>& z) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[k];
      s = ((f[q] + static_cast<double>(q) * q) -
           (f[p] + static_cast<double>(p) * p)) /
          (2.0 * (q - p));
      // z[0] is -inf, so k never drops below zero here.
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double diff = q - v[j];
    d[q] = diff * diff + f[v[j]];
  }
}

// Exact squared Euclidean distance from every pixel to the nearest set pixel.
std::vector<double> SquaredDistanceField(const BinaryMask& mask) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const int w = mask.width();
  const int h = mask.height();
  const int n = std::max(w, h);
  std::vector<double> field(static_cast<std::size_t>(w) * h);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);

  std::vector<double> f(h), d(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = mask.Get(x, y) ? 0.0 : kInf;
    DistanceTransform1d(f, d, v, z);
    for (int y = 0; y < h; ++y) field[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(w);
  d.resize(w);
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    std::copy_n(field.begin() + row, w, f.begin());
    DistanceTransform1d(f, d, v, z);
    std::copy_n(d.begin(), w, field.begin() + row);
  }
  return field;
}

}  // namespace

bool BoundingBox::IsValid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) &&
         std::isfinite(x_max) && std::isfinite(y_max) && x_min < x_max &&
         y_min < y_max;
}

bool BoundingBox::Contains(const PixelPoint& p) const {
  return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "mask dims must be >= 1, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : BinaryMask(width, height) {
  if (bits.size() != bits_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "mask bit count " + std::to_string(bits.size()) +
                    " does not match dims");
  }
  for (auto& b : bits) b = b ? 1 : 0;
  bits_ = std::move(bits);
}

void BinaryMask::FillRect(int x0, int y0, int x1, int y1) {
  x0 = std::clamp(x0, 0, width_);
  x1 = std::clamp(x1, 0, width_);
  y0 = std::clamp(y0, 0, height_);
  y1 = std::clamp(y1, 0, height_);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) Set(x, y);
  }
}

std::size_t BinaryMask::CountSet() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::optional<BoundingBox> BinaryMask::TightBox() const {
  int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!Get(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  if (x1 < 0) return std::nullopt;
  return BoundingBox{static_cast<double>(x0), static_cast<double>(y0),
                     static_cast<double>(x1 + 1), static_cast<double>(y1 + 1)};
}

PixelPoint Centroid(const BinaryMask& mask) {
  // Integer sums keep the result exact up to the final division.
  std::int64_t sum_x = 0, sum_y = 0, n = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.Get(x, y)) continue;
      sum_x += x;
      sum_y += y;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptyMask, "centroid of an empty mask");
  const double count = static_cast<double>(n);
  return {static_cast<double>(sum_x) / count + 0.5,
          static_cast<double>(sum_y) / count + 0.5};
}

PixelPoint BoxCenter(const BoundingBox& box) {
  return {(box.x_min + box.x_max) / 2.0, (box.y_min + box.y_max) / 2.0};
}

double Distance(const PixelPoint& a, const PixelPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

BinaryMask UnionMasks(std::span<const BinaryMask> masks) {
  if (masks.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "union of an empty mask list");
  }
  for (const auto& m : masks) RequireSameDims(masks.front(), m);
  std::vector<std::uint8_t> bits(masks.front().bits().begin(),
                                 masks.front().bits().end());
  for (const auto& m : masks.subspan(1)) {
    const auto other = m.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] |= other[i];
  }
  return BinaryMask(masks.front().width(), masks.front().height(),
                    std::move(bits));
}

bool MasksOverlap(const BinaryMask& a, const BinaryMask& b) {
  RequireSameDims(a, b);
  const auto ab = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i] && bb[i]) return true;
  }
  return false;
}

std::optional<double> MaskDistance(const BinaryMask& a, const BinaryMask& b) {
  RequireSameDims(a, b);
  if (a.Empty() || b.Empty()) return std::nullopt;
  if (MasksOverlap(a, b)) return 0.0;
  const auto field = SquaredDistanceField(b);
  double best = std::numeric_limits<double>::infinity();
  const auto ab = a.bits();
  for (std::size_t i = 0; i < ab.size(); ++i) {
    if (ab[i]) best = std::min(best, field[i]);
  }
  return std::sqrt(best);
}

ScaledDims NormalizeScale(ImageDims dims, std::int64_t target_pixels) {
  if (!dims.IsValid()) {
    throw Error(ErrorCode::kInvalidArgument, "image dims must be >= 1");
  }
  if (target_pixels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "target_pixels must be >= 1");
  }
  const double scale = std::sqrt(static_cast<double>(target_pixels) /
                                 static_cast<double>(dims.PixelCount()));
  // nearbyint rounds half-to-even under the default rounding mode.
  auto axis = [scale](int n) {
    const double r = std::nearbyint(static_cast<double>(n) * scale);
    return static_cast<int>(std::max(1.0, r));
  };
  return {scale, ImageDims{axis(dims.width), axis(dims.height)}};
}

BinaryMask ResampleMask(const BinaryMask& mask, ImageDims dims) {
  if (dims == mask.dims()) return mask;
  BinaryMask out(dims);
  const double sx = static_cast<double>(mask.width()) / dims.width;
  const double sy = static_cast<double>(mask.height()) / dims.height;
  for (int y = 0; y < dims.height; ++y) {
    const int src_y =
        std::min(mask.height() - 1, static_cast<int>((y + 0.5) * sy));
    for (int x = 0; x < dims.width; ++x) {
      const int src_x =
          std::min(mask.width() - 1, static_cast<int>((x + 0.5) * sx));
      if (mask.Get(src_x, src_y)) out.Set(x, y);
    }
  }
  return out;
}

BoundingBox ScaleBox(const BoundingBox& box, double sx, double sy) {
  return {box.x_min * sx, box.y_min * sy, box.x_max * sx, box.y_max * sy};
}

}  // namespace iconoread
