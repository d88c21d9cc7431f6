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

// The attribute -> saint association database. An attribute (a symbol such
// as "keys") maps to an ordered list of candidate saints with priors; the
// document order of candidates is authoritative.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace iconoread {

struct SaintCandidate {
  std::string saint;
  double prior = 1.0;

  friend bool operator==(const SaintCandidate&, const SaintCandidate&) = default;
};

struct AssociationEntry {
  std::string attribute;
  std::vector<SaintCandidate> candidates;

  friend bool operator==(const AssociationEntry&,
                         const AssociationEntry&) = default;
};

// Schema-level view of a database file, before any invariant is checked.
struct DatabaseDocument {
  std::string version;
  std::vector<AssociationEntry> entries;

  friend bool operator==(const DatabaseDocument&,
                         const DatabaseDocument&) = default;
};

enum class Severity { kWarning, kError };

struct Finding {
  Severity severity = Severity::kError;
  std::string attribute;  // empty for database-wide findings
  std::string message;
};

std::string FormatFinding(const Finding& finding);

/// Attribute labels match [a-z][a-z0-9_]*.
bool IsValidAttributeLabel(std::string_view label);

/// Immutable, validated database.
class AssociationDatabase {
 public:
  /// Throws kValidation (message lists the error findings) when the
  /// document violates any invariant.
  static AssociationDatabase FromDocument(DatabaseDocument document);

  const std::string& version() const { return document_.version; }
  const std::vector<AssociationEntry>& entries() const {
    return document_.entries;
  }
  const DatabaseDocument& document() const { return document_; }

  /// Candidates in document order; empty for an unknown attribute.
  std::span<const SaintCandidate> SaintsFor(std::string_view attribute) const;

 private:
  explicit AssociationDatabase(DatabaseDocument document);

  DatabaseDocument document_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws kParse on malformed JSON and kSchema on missing or mistyped fields.
DatabaseDocument ParseDatabaseDocument(std::string_view json_text);

AssociationDatabase LoadDatabase(std::string_view json_text);
/// Also throws kIo when the file cannot be read.
AssociationDatabase LoadDatabaseFile(const std::filesystem::path& path);

std::string SerializeDatabase(const DatabaseDocument& document);

/// Errors are invariant violations; warnings flag suspicious but legal
/// content. An empty result means the database is clean.
std::vector<Finding> ValidateDatabase(const DatabaseDocument& document);

bool HasErrors(std::span<const Finding> findings);

}  // namespace iconoread
