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

#include "image_io.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <string>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "iconoread/error.hpp"

namespace iconoread::internal {
namespace {

cv::Mat Decode(const std::filesystem::path& image) {
  cv::Mat pixels;
  try {
    pixels = cv::imread(image.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kImageUnreadable,
                "cannot decode " + image.string() + ": " + e.what());
  }
  if (pixels.empty()) {
    throw Error(ErrorCode::kImageUnreadable, "cannot decode " + image.string());
  }
  return pixels;
}

const std::array<cv::Scalar, 6> kFigureColors = {
    cv::Scalar(60, 20, 220),  cv::Scalar(180, 105, 255), cv::Scalar(0, 165, 255),
    cv::Scalar(50, 205, 50),  cv::Scalar(255, 144, 30),  cv::Scalar(130, 0, 75)};

cv::Point ToPixel(const PixelPoint& p) {
  return {static_cast<int>(p.x), static_cast<int>(p.y)};
}

void Label(cv::Mat& canvas, const std::string& text, cv::Point at,
           const cv::Scalar& color) {
  constexpr double kScale = 0.45;
  int baseline = 0;
  const cv::Size size =
      cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, kScale, 1, &baseline);
  at.x = std::clamp(at.x, 0, std::max(0, canvas.cols - size.width));
  at.y = std::clamp(at.y, size.height, std::max(size.height, canvas.rows - baseline));
  cv::rectangle(canvas, at + cv::Point(0, baseline),
                at + cv::Point(size.width, -size.height), cv::Scalar(0, 0, 0),
                cv::FILLED);
  cv::putText(canvas, text, at, cv::FONT_HERSHEY_SIMPLEX, kScale, color, 1,
              cv::LINE_AA);
}

}  // namespace

ImageDims DecodeImageDims(const std::filesystem::path& image) {
  const cv::Mat pixels = Decode(image);
  return {pixels.cols, pixels.rows};
}

void WriteOverlay(const std::filesystem::path& image, const Analysis& analysis,
                  const std::filesystem::path& out) {
  const ImageDims dims = analysis.metadata.normalized_dims;
  cv::Mat canvas;
  cv::resize(Decode(image), canvas, cv::Size(dims.width, dims.height), 0, 0,
             cv::INTER_AREA);

  const Reading& reading = analysis.reading;
  cv::Mat tint = canvas.clone();
  for (const auto& f : reading.figures) {
    const cv::Scalar color = kFigureColors[f.id % kFigureColors.size()];
    const BinaryMask& mask = f.merged_mask;
    if (mask.dims() != dims) continue;
    for (int y = 0; y < dims.height; ++y) {
      auto* row = tint.ptr<cv::Vec3b>(y);
      for (int x = 0; x < dims.width; ++x) {
        if (mask.Get(x, y)) {
          row[x] = cv::Vec3b(static_cast<uchar>(color[0]),
                             static_cast<uchar>(color[1]),
                             static_cast<uchar>(color[2]));
        }
      }
    }
  }
  cv::addWeighted(tint, 0.35, canvas, 0.65, 0.0, canvas);

  const cv::Scalar box_color(0, 255, 255);
  for (const auto& d : analysis.detections) {
    if (d.confidence < analysis.metadata.retention_threshold) continue;
    cv::rectangle(canvas,
                  cv::Point(static_cast<int>(d.box.x_min), static_cast<int>(d.box.y_min)),
                  cv::Point(static_cast<int>(d.box.x_max), static_cast<int>(d.box.y_max)),
                  box_color, 2);
    Label(canvas, d.label + " " + std::to_string(static_cast<int>(d.confidence * 100 + 0.5)) + "%",
          cv::Point(static_cast<int>(d.box.x_min), static_cast<int>(d.box.y_min) - 3),
          box_color);
  }

  std::map<int, std::string> names;
  for (const auto& a : reading.assignments) {
    auto& n = names[a.figure_id];
    n += (n.empty() ? "" : " / ") + a.saint;
  }
  for (const auto& f : reading.figures) {
    const cv::Scalar color = kFigureColors[f.id % kFigureColors.size()];
    const cv::Point c = ToPixel(f.centroid);
    cv::drawMarker(canvas, c, cv::Scalar(255, 255, 255), cv::MARKER_CROSS, 14, 2);
    cv::drawMarker(canvas, c, color, cv::MARKER_CROSS, 12, 1);
    auto it = names.find(f.id);
    const std::string text = "#" + std::to_string(f.id) +
                             (it == names.end() ? "" : " " + it->second);
    Label(canvas, text, c + cv::Point(8, -8), cv::Scalar(255, 255, 255));
  }

  bool written = false;
  try {
    written = cv::imwrite(out.string(), canvas);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kIo, "cannot write overlay " + out.string() + ": " + e.what());
  }
  if (!written) throw Error(ErrorCode::kIo, "cannot write overlay " + out.string());
}

}  // namespace iconoread::internal
