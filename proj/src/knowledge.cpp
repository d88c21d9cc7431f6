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

#include "iconoread/knowledge.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "iconoread/error.hpp"
#include "io_util.hpp"

namespace iconoread {
namespace {

using nlohmann::json;

// A saint listed under more attributes than this draws a warning.
constexpr std::size_t kManyAttributesPerSaint = 3;

const json& RequireField(const json& object, const char* key,
                         const std::string& where) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kSchema, where + " must be an object");
  }
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kSchema,
                where + " is missing field \"" + key + "\"");
  }
  return *it;
}

std::string RequireString(const json& object, const char* key,
                          const std::string& where) {
  const json& v = RequireField(object, key, where);
  if (!v.is_string()) {
    throw Error(ErrorCode::kSchema,
                where + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

std::string FormatFinding(const Finding& finding) {
  std::string out = finding.severity == Severity::kError ? "error" : "warning";
  if (!finding.attribute.empty()) out += " [" + finding.attribute + "]";
  out += ": " + finding.message;
  return out;
}

bool IsValidAttributeLabel(std::string_view label) {
  if (label.empty() || label.front() < 'a' || label.front() > 'z') return false;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

bool HasErrors(std::span<const Finding> findings) {
  for (const auto& f : findings) {
    if (f.severity == Severity::kError) return true;
  }
  return false;
}

std::vector<Finding> ValidateDatabase(const DatabaseDocument& document) {
  std::vector<Finding> findings;
  auto error = [&](const std::string& attr, std::string msg) {
    findings.push_back({Severity::kError, attr, std::move(msg)});
  };
  auto warn = [&](const std::string& attr, std::string msg) {
    findings.push_back({Severity::kWarning, attr, std::move(msg)});
  };

  if (document.entries.empty()) error("", "database has no entries");

  std::set<std::string> seen_attributes;
  std::map<std::string, std::size_t> attributes_per_saint;
  for (const auto& entry : document.entries) {
    const std::string& attr = entry.attribute;
    if (!IsValidAttributeLabel(attr)) {
      error(attr, "attribute label must match [a-z][a-z0-9_]*");
    }
    if (!seen_attributes.insert(attr).second) {
      error(attr, "duplicate attribute key");
    }
    if (entry.candidates.empty()) {
      error(attr, "candidate list is empty");
      continue;
    }
    std::set<std::string> saints;
    double previous = 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < entry.candidates.size(); ++i) {
      const auto& c = entry.candidates[i];
      if (c.saint.empty()) error(attr, "empty saint name");
      if (!saints.insert(c.saint).second) {
        error(attr, "saint \"" + c.saint + "\" listed twice");
      }
      if (!std::isfinite(c.prior) || c.prior <= 0.0 || c.prior > 1.0) {
        std::ostringstream msg;
        msg << "prior " << c.prior << " for \"" << c.saint
            << "\" is outside (0, 1]";
        error(attr, msg.str());
      } else if (i > 0 && c.prior > previous) {
        error(attr, "priors increase at \"" + c.saint +
                        "\"; candidates must be ordered by prior");
      }
      previous = c.prior;
      total += c.prior;
    }
    if (total > 1.0 + 1e-9) {
      warn(attr, "candidate priors sum to more than 1");
    }
    for (const auto& s : saints) ++attributes_per_saint[s];
  }
  for (const auto& [saint, count] : attributes_per_saint) {
    if (count > kManyAttributesPerSaint) {
      warn("", "saint \"" + saint + "\" appears under " +
                   std::to_string(count) + " attributes");
    }
  }
  return findings;
}

AssociationDatabase::AssociationDatabase(DatabaseDocument document)
    : document_(std::move(document)) {
  for (std::size_t i = 0; i < document_.entries.size(); ++i) {
    index_.emplace(document_.entries[i].attribute, i);
  }
}

AssociationDatabase AssociationDatabase::FromDocument(DatabaseDocument document) {
  const auto findings = ValidateDatabase(document);
  if (HasErrors(findings)) {
    std::string msg = "invalid association database";
    for (const auto& f : findings) {
      if (f.severity == Severity::kError) msg += "\n  " + FormatFinding(f);
    }
    throw Error(ErrorCode::kValidation, msg);
  }
  return AssociationDatabase(std::move(document));
}

std::span<const SaintCandidate> AssociationDatabase::SaintsFor(
    std::string_view attribute) const {
  auto it = index_.find(std::string(attribute));
  if (it == index_.end()) return {};
  return document_.entries[it->second].candidates;
}

DatabaseDocument ParseDatabaseDocument(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("database: ") + e.what());
  }
  DatabaseDocument doc;
  doc.version = RequireString(root, "version", "database");
  const json& entries = RequireField(root, "entries", "database");
  if (!entries.is_array()) {
    throw Error(ErrorCode::kSchema, "database.entries must be an array");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "entries[" + std::to_string(i) + "]";
    AssociationEntry entry;
    entry.attribute = RequireString(entries[i], "attribute", where);
    const json& candidates = RequireField(entries[i], "candidates", where);
    if (!candidates.is_array()) {
      throw Error(ErrorCode::kSchema, where + ".candidates must be an array");
    }
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::string cwhere = where + ".candidates[" + std::to_string(j) + "]";
      SaintCandidate c;
      c.saint = RequireString(candidates[j], "saint", cwhere);
      const json& prior = RequireField(candidates[j], "prior", cwhere);
      if (!prior.is_number()) {
        throw Error(ErrorCode::kSchema, cwhere + ".prior must be a number");
      }
      c.prior = prior.get<double>();
      entry.candidates.push_back(std::move(c));
    }
    doc.entries.push_back(std::move(entry));
  }
  return doc;
}

AssociationDatabase LoadDatabase(std::string_view json_text) {
  return AssociationDatabase::FromDocument(ParseDatabaseDocument(json_text));
}

AssociationDatabase LoadDatabaseFile(const std::filesystem::path& path) {
  return LoadDatabase(internal::ReadTextFile(path));
}

std::string SerializeDatabase(const DatabaseDocument& document) {
  json entries = json::array();
  for (const auto& e : document.entries) {
    json candidates = json::array();
    for (const auto& c : e.candidates) {
      candidates.push_back({{"saint", c.saint}, {"prior", c.prior}});
    }
    entries.push_back({{"attribute", e.attribute}, {"candidates", candidates}});
  }
  json root = {{"version", document.version}, {"entries", entries}};
  return root.dump(2) + "\n";
}

}  // namespace iconoread
