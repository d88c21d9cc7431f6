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

#pragma once

#include <filesystem>

#include "iconoread/geometry.hpp"
#include "iconoread/pipeline.hpp"

namespace iconoread::internal {

/// Fully decodes the image and returns its dims. Throws kImageUnreadable.
ImageDims DecodeImageDims(const std::filesystem::path& image);

/// Writes the image at normalized resolution with attribute boxes, figure
/// masks and centroids, and assigned saint names drawn on top.
void WriteOverlay(const std::filesystem::path& image, const Analysis& analysis,
                  const std::filesystem::path& out);

}  // namespace iconoread::internal
