#pragma once

#include "bdfusion/config.hpp"
#include "bdfusion/pipeline.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bdfusion::container {

inline constexpr int kFormatVersion = 1;

/// One trained modality: its preprocessing chain and kernel model.
struct ModalityModel {
  std::string name;
  std::vector<std::string> feature_names;
  pipeline::TrainedModel model;
};

/// Everything needed to reproduce predictions.
///
/// On disk: the 8 bytes "BDFMODEL", a little-endian uint64 header length,
/// a UTF-8 JSON header (format version, config snapshot, dimension chain,
/// scalar parameters and an array table), then every array as row-major
/// little-endian float64 in the order the table lists them.
struct ModelContainer {
  int format_version = kFormatVersion;
  config::KeyValues config;
  std::vector<ModalityModel> modalities;

  const ModalityModel& modality(const std::string& name) const;
};

void save(std::ostream& out, const ModelContainer& c);
void save(const std::filesystem::path& path, const ModelContainer& c);

/// Throws Error on an unknown version, malformed header, truncated payload or
/// a broken dimension chain.
ModelContainer load(std::istream& in);
ModelContainer load(const std::filesystem::path& path);

}  // namespace bdfusion::container
