#pragma once

#include <bdfusion/common.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace bdfusion::cli {

/// Feature CSV: sample_id,label,<feature columns...>. Labels may be empty
/// for unlabelled rows.
struct FeatureTable {
  FeatureMatrix features;
  std::vector<std::string> labels;

  /// Throws when a label is empty or outside `classes`.
  Dataset to_dataset(const ClassSet& classes) const;
};

void write_feature_table(const std::filesystem::path& path, const FeatureTable& t);
FeatureTable read_feature_table(const std::filesystem::path& path);
/// Row-concatenation of several tables with identical columns.
FeatureTable read_feature_tables(const std::vector<std::filesystem::path>& paths);

/// Prediction CSV: sample_id,predicted_class,p_<class>...
struct PredictionTable {
  std::vector<std::string> sample_ids;
  ClassSet classes;
  ProbMatrix probs;
  std::vector<int> predicted;
};

PredictionTable make_predictions(std::vector<std::string> ids, const ClassSet& classes, ProbMatrix probs);
void write_predictions(const std::filesystem::path& path, const PredictionTable& p);
PredictionTable read_predictions(const std::filesystem::path& path);

/// sample_id -> label from any CSV with sample_id and label (or ymrs) columns.
std::vector<int> read_truth(const std::filesystem::path& path, const std::vector<std::string>& ids,
                            const ClassSet& classes);

}  // namespace bdfusion::cli
