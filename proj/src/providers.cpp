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

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <system_error>

#include <nlohmann/json.hpp>

#include "iconoread/error.hpp"
#include "iconoread/knowledge.hpp"
#include "io_util.hpp"

extern char** environ;

namespace iconoread {
namespace {

using nlohmann::json;

[[noreturn]] void Protocol(const std::string& msg) {
  throw Error(ErrorCode::kProtocol, "provider response: " + msg);
}

const json& Field(const json& object, const char* key, const std::string& where) {
  if (!object.is_object()) Protocol(where + " must be an object");
  auto it = object.find(key);
  if (it == object.end()) Protocol(where + " is missing \"" + key + "\"");
  return *it;
}

int IntField(const json& object, const char* key, const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_number_integer()) Protocol(where + "." + key + " must be an integer");
  return v.get<int>();
}

double NumberField(const json& object, const char* key,
                   const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_number()) Protocol(where + "." + key + " must be a number");
  return v.get<double>();
}

std::string StringField(const json& object, const char* key,
                        const std::string& where) {
  const json& v = Field(object, key, where);
  if (!v.is_string()) Protocol(where + "." + key + " must be a string");
  return v.get<std::string>();
}

BinaryMask MaskFromJson(const json& rle, const std::string& where) {
  const int width = IntField(rle, "width", where);
  const int height = IntField(rle, "height", where);
  if (width < 1 || height < 1) Protocol(where + " has non-positive dims");
  const json& rows = Field(rle, "rows", where);
  if (!rows.is_array()) Protocol(where + ".rows must be an array");
  MaskRuns runs;
  runs.reserve(rows.size());
  for (const auto& row : rows) {
    if (!row.is_array()) Protocol(where + ".rows entries must be arrays");
    auto& out = runs.emplace_back();
    for (const auto& run : row) {
      if (!run.is_array() || run.size() != 2 || !run[0].is_number_integer() ||
          !run[1].is_number_integer()) {
        Protocol(where + " runs must be [start, len] integer pairs");
      }
      out.emplace_back(run[0].get<int>(), run[1].get<int>());
    }
  }
  return DecodeRuns(width, height, runs);
}

json MaskToJson(const BinaryMask& mask) {
  json rows = json::array();
  for (const auto& row : EncodeRuns(mask)) {
    json r = json::array();
    for (const auto& [start, len] : row) r.push_back({start, len});
    rows.push_back(std::move(r));
  }
  return {{"width", mask.width()}, {"height", mask.height()}, {"rows", rows}};
}

void CheckConfidence(double c, const std::string& where) {
  if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
    Protocol(where + " confidence outside [0, 1]");
  }
}

void CheckResponseDims(const ProviderResponse& response) {
  if (!response.dims.IsValid()) Protocol("dims must be >= 1");
}

bool AttributeOrder(const AttributeInstance& a, const AttributeInstance& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.label != b.label) return a.label < b.label;
  if (a.location.x != b.location.x) return a.location.x < b.location.x;
  return a.location.y < b.location.y;
}

void CheckRetentionArgs(double threshold, int max_count) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  if (max_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_count must be >= 1");
  }
}

std::string RunAndCapture(const std::filesystem::path& executable,
                          const std::filesystem::path& image) {
  std::array<int, 2> pipe_fds{};
  if (::pipe(pipe_fds.data()) != 0) {
    throw Error(ErrorCode::kProviderUnavailable,
                std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addclose(&actions, pipe_fds[0]);
  posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, pipe_fds[1]);

  const std::string exe = executable.string();
  const std::string arg = image.string();
  std::array<char*, 3> argv{const_cast<char*>(exe.c_str()),
                            const_cast<char*>(arg.c_str()), nullptr};
  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, exe.c_str(), &actions, nullptr,
                                argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(pipe_fds[1]);
  if (rc != 0) {
    ::close(pipe_fds[0]);
    throw Error(ErrorCode::kProviderUnavailable,
                "cannot start provider " + exe + ": " + std::strerror(rc));
  }

  std::string output;
  std::array<char, 65536> buffer{};
  while (true) {
    const ssize_t n = ::read(pipe_fds[0], buffer.data(), buffer.size());
    if (n > 0) {
      output.append(buffer.data(), static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      break;
    }
  }
  ::close(pipe_fds[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      throw Error(ErrorCode::kProviderUnavailable, "waitpid failed");
    }
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127 && output.empty()) {
    // posix_spawnp reports exec failure this way on glibc.
    throw Error(ErrorCode::kProviderUnavailable,
                "provider " + exe + " could not be executed");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    Protocol("provider " + exe + " exited abnormally (status " +
             std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) +
             ")");
  }
  return output;
}

}  // namespace

std::string_view SemanticClassName(SemanticClass c) {
  switch (c) {
    case SemanticClass::kPerson: return "PERSON";
    case SemanticClass::kAnimal: return "ANIMAL";
    case SemanticClass::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<SemanticClass> ParseSemanticClass(std::string_view name) {
  if (name == "PERSON") return SemanticClass::kPerson;
  if (name == "ANIMAL") return SemanticClass::kAnimal;
  if (name == "OTHER") return SemanticClass::kOther;
  return std::nullopt;
}

ClassMap ClassMap::Default() {
  ClassMap map;
  map.Set("person", SemanticClass::kPerson);
  for (const char* animal : {"animal", "bird", "cat", "dog", "horse", "sheep",
                             "cow", "elephant", "bear", "zebra", "giraffe"}) {
    map.Set(animal, SemanticClass::kAnimal);
  }
  return map;
}

void ClassMap::Set(std::string raw_label, SemanticClass c) {
  entries_[std::move(raw_label)] = c;
}

SemanticClass ClassMap::Classify(std::string_view raw_label) const {
  auto it = entries_.find(raw_label);
  return it == entries_.end() ? SemanticClass::kOther : it->second;
}

MaskRuns EncodeRuns(const BinaryMask& mask) {
  MaskRuns rows(mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    int x = 0;
    while (x < mask.width()) {
      if (!mask.Get(x, y)) {
        ++x;
        continue;
      }
      const int start = x;
      while (x < mask.width() && mask.Get(x, y)) ++x;
      rows[y].emplace_back(start, x - start);
    }
  }
  return rows;
}

BinaryMask DecodeRuns(int width, int height, const MaskRuns& rows) {
  if (width < 1 || height < 1) Protocol("mask dims must be >= 1");
  if (rows.size() != static_cast<std::size_t>(height)) {
    Protocol("mask has " + std::to_string(rows.size()) + " rows, expected " +
             std::to_string(height));
  }
  BinaryMask mask(width, height);
  for (int y = 0; y < height; ++y) {
    int previous_end = 0;
    for (const auto& [start, len] : rows[y]) {
      if (start < previous_end || len < 1 || start + len > width) {
        Protocol("invalid run [" + std::to_string(start) + ", " +
                 std::to_string(len) + "] in row " + std::to_string(y));
      }
      for (int x = start; x < start + len; ++x) mask.Set(x, y);
      previous_end = start + len;
    }
  }
  return mask;
}

ProviderResponse ParseProviderResponse(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Protocol(std::string("invalid JSON: ") + e.what());
  }
  ProviderResponse response;
  const json& dims = Field(root, "dims", "response");
  response.dims = {IntField(dims, "width", "dims"),
                   IntField(dims, "height", "dims")};
  if (!response.dims.IsValid()) Protocol("dims must be >= 1");

  const json& detections = Field(root, "detections", "response");
  if (!detections.is_array()) Protocol("detections must be an array");
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const std::string where = "detections[" + std::to_string(i) + "]";
    const json& d = detections[i];
    Detection det;
    det.label = StringField(d, "label", where);
    det.confidence = NumberField(d, "confidence", where);
    const json& box = Field(d, "box", where);
    if (!box.is_array() || box.size() != 4 ||
        !std::all_of(box.begin(), box.end(),
                     [](const json& v) { return v.is_number(); })) {
      Protocol(where + ".box must be four numbers");
    }
    det.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
               box[3].get<double>()};
    if (auto it = d.find("mask"); it != d.end() && !it->is_null()) {
      det.mask = MaskFromJson(*it, where + ".mask");
    }
    response.detections.push_back(std::move(det));
  }

  const json& regions = Field(root, "regions", "response");
  if (!regions.is_array()) Protocol("regions must be an array");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    const json& r = regions[i];
    RawRegion region;
    region.raw_label = StringField(r, "raw_label", where);
    region.confidence = NumberField(r, "confidence", where);
    region.mask = MaskFromJson(Field(r, "mask", where), where + ".mask");
    response.regions.push_back(std::move(region));
  }
  return response;
}

std::string SerializeProviderResponse(const ProviderResponse& response) {
  json detections = json::array();
  for (const auto& d : response.detections) {
    json item = {{"label", d.label},
                 {"confidence", d.confidence},
                 {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}}};
    if (d.mask) item["mask"] = MaskToJson(*d.mask);
    detections.push_back(std::move(item));
  }
  json regions = json::array();
  for (const auto& r : response.regions) {
    regions.push_back({{"raw_label", r.raw_label},
                       {"confidence", r.confidence},
                       {"mask", MaskToJson(r.mask)}});
  }
  json root = {
      {"dims", {{"width", response.dims.width}, {"height", response.dims.height}}},
      {"detections", detections},
      {"regions", regions}};
  return root.dump() + "\n";
}

std::filesystem::path FixtureProvider::SidecarFor(
    const std::filesystem::path& image) {
  auto sidecar = image;
  sidecar.replace_extension(".detections.json");
  return sidecar;
}

ProviderResponse FixtureProvider::Query(const std::filesystem::path& image) {
  const auto path = sidecar_ ? *sidecar_ : SidecarFor(image);
  return ParseProviderResponse(
      internal::ReadTextFile(path, ErrorCode::kProviderUnavailable));
}

ProviderResponse SubprocessProvider::Query(const std::filesystem::path& image) {
  if (cache_ && cache_->first == image) return cache_->second;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(image, ec)) {
    throw Error(ErrorCode::kImageUnreadable, "cannot read " + image.string());
  }
  auto response = ParseProviderResponse(RunAndCapture(executable_, image));
  cache_.emplace(image, response);
  return response;
}

std::vector<Detection> CheckedDetections(const ProviderResponse& response,
                                         ImageDims dims) {
  CheckResponseDims(response);
  const double w = response.dims.width;
  const double h = response.dims.height;
  const double sx = dims.width / w;
  const double sy = dims.height / h;
  const bool rescale = dims != response.dims;

  std::vector<Detection> out;
  out.reserve(response.detections.size());
  for (std::size_t i = 0; i < response.detections.size(); ++i) {
    const std::string where = "detections[" + std::to_string(i) + "]";
    Detection d = response.detections[i];
    if (!IsValidAttributeLabel(d.label)) {
      Protocol(where + " label \"" + d.label + "\" is not a valid attribute");
    }
    CheckConfidence(d.confidence, where);
    if (!d.box.IsValid() || d.box.x_min < 0.0 || d.box.y_min < 0.0 ||
        d.box.x_max > w || d.box.y_max > h) {
      Protocol(where + " box is invalid or outside the image");
    }
    if (d.mask && d.mask->dims() != response.dims) {
      Protocol(where + " mask dims differ from image dims");
    }
    if (rescale) {
      d.box = ScaleBox(d.box, sx, sy);
      if (d.mask) d.mask = ResampleMask(*d.mask, dims);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<SegmentRegion> CheckedRegions(const ProviderResponse& response,
                                          ImageDims dims,
                                          const ClassMap& class_map) {
  CheckResponseDims(response);
  std::vector<SegmentRegion> out;
  out.reserve(response.regions.size());
  for (std::size_t i = 0; i < response.regions.size(); ++i) {
    const std::string where = "regions[" + std::to_string(i) + "]";
    const RawRegion& r = response.regions[i];
    CheckConfidence(r.confidence, where);
    if (r.mask.dims() != response.dims) {
      Protocol(where + " mask dims differ from image dims");
    }
    out.push_back({r.raw_label, class_map.Classify(r.raw_label),
                   ResampleMask(r.mask, dims), r.confidence});
  }
  return out;
}

std::vector<Detection> DetectAttributes(Provider& provider,
                                        const std::filesystem::path& image,
                                        ImageDims dims) {
  return CheckedDetections(provider.Query(image), dims);
}

std::vector<SegmentRegion> SegmentFigures(Provider& provider,
                                          const std::filesystem::path& image,
                                          ImageDims dims,
                                          const ClassMap& class_map) {
  return CheckedRegions(provider.Query(image), dims, class_map);
}

std::string_view LocationModeName(LocationMode mode) {
  return mode == LocationMode::kBoxCenter ? "box_center" : "mask_centroid";
}

std::optional<LocationMode> ParseLocationMode(std::string_view name) {
  if (name == "box_center") return LocationMode::kBoxCenter;
  if (name == "mask_centroid") return LocationMode::kMaskCentroid;
  return std::nullopt;
}

std::vector<AttributeInstance> RetainAttributes(
    std::span<const Detection> detections, double threshold, int max_count,
    LocationMode mode) {
  CheckRetentionArgs(threshold, max_count);
  std::vector<AttributeInstance> located;
  located.reserve(detections.size());
  for (const auto& d : detections) {
    PixelPoint location = BoxCenter(d.box);
    if (mode == LocationMode::kMaskCentroid && d.mask && !d.mask->Empty()) {
      location = Centroid(*d.mask);
    }
    located.push_back({d.label, location, d.confidence});
  }
  return RetainAttributes(located, threshold, max_count);
}

std::vector<AttributeInstance> RetainAttributes(
    std::span<const AttributeInstance> instances, double threshold,
    int max_count) {
  CheckRetentionArgs(threshold, max_count);
  std::vector<AttributeInstance> kept;
  for (const auto& a : instances) {
    if (a.confidence >= threshold) kept.push_back(a);
  }
  std::stable_sort(kept.begin(), kept.end(), AttributeOrder);
  if (kept.size() > static_cast<std::size_t>(max_count)) kept.resize(max_count);
  return kept;
}

}  // namespace iconoread
