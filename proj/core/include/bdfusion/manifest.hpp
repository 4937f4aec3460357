#pragma once

#include "bdfusion/common.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdfusion::manifest {

struct Entry {
  std::string sample_id;
  std::string split;
  std::string label;
  std::optional<int> ymrs;
  /// modality -> LLD file path (absolute after loading).
  std::map<std::string, std::filesystem::path> lld;
  std::optional<std::filesystem::path> timestamps;
};

/// Dataset index: columns sample_id, split, then optional label, ymrs and
/// timestamps; every other column names a modality and holds an LLD path.
/// Relative paths resolve against the manifest's directory.
struct Manifest {
  std::vector<std::string> modalities;
  std::vector<Entry> entries;

  /// Class id of an entry: the explicit label when present, otherwise the
  /// YMRS score mapped through the remission/hypomania/mania thresholds.
  int class_of(const Entry& e, const ClassSet& classes) const;
  std::vector<const Entry*> in_split(const std::string& split) const;
};

bool valid_split(const std::string& s);

/// Throws on duplicate ids, bad splits, unreadable paths or missing labels.
Manifest load(const std::filesystem::path& path);

/// Writes paths relative to the manifest's directory when possible.
void save(const std::filesystem::path& path, const Manifest& m);

}  // namespace bdfusion::manifest
