#include "tables.hpp"

#include <bdfusion/csv.hpp>
#include <bdfusion/metrics.hpp>

#include <fstream>
#include <map>

namespace bdfusion::cli {

Dataset FeatureTable::to_dataset(const ClassSet& classes) const {
  Dataset d;
  d.features = features;
  d.classes = classes;
  d.labels.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) throw Error("sample " + features.sample_ids[i] + " has no label");
    d.labels.push_back(classes.id_of(labels[i]));
  }
  return d;
}

void write_feature_table(const std::filesystem::path& path, const FeatureTable& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  std::vector<std::string> header = {"sample_id", "label"};
  header.insert(header.end(), t.features.feature_names.begin(), t.features.feature_names.end());
  out << csv::join(header) << '\n';
  for (Eigen::Index i = 0; i < t.features.rows(); ++i) {
    out << t.features.sample_ids[static_cast<std::size_t>(i)] << ',' << t.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < t.features.cols(); ++j) out << ',' << csv::format_real(t.features.values(i, j));
    out << '\n';
  }
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  if (table.header.size() < 2 || table.header[0] != "sample_id" || table.header[1] != "label") {
    throw IngestError(path.string() + ": feature table must start with sample_id,label columns");
  }
  FeatureTable t;
  t.features.feature_names.assign(table.header.begin() + 2, table.header.end());
  const auto k = static_cast<Eigen::Index>(t.features.feature_names.size());
  t.features.values.resize(static_cast<Eigen::Index>(table.rows.size()), k);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.fields.size() != table.header.size()) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": wrong number of fields");
    }
    t.features.sample_ids.push_back(row.fields[0]);
    t.labels.push_back(row.fields[1]);
    for (Eigen::Index j = 0; j < k; ++j) {
      try {
        t.features.values(static_cast<Eigen::Index>(r), j) =
            csv::parse_real(row.fields[static_cast<std::size_t>(j + 2)], row.line);
      } catch (const IngestError& e) {
        throw IngestError(path.string() + ": " + e.what());
      }
    }
  }
  return t;
}

FeatureTable read_feature_tables(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw Error("no feature tables given");
  FeatureTable out = read_feature_table(paths.front());
  for (std::size_t i = 1; i < paths.size(); ++i) {
    auto next = read_feature_table(paths[i]);
    if (next.features.feature_names != out.features.feature_names) {
      throw DimensionError(paths[i].string() + ": columns differ from " + paths.front().string());
    }
    Matrix merged(out.features.rows() + next.features.rows(), out.features.cols());
    merged << out.features.values, next.features.values;
    out.features.values = std::move(merged);
    out.features.sample_ids.insert(out.features.sample_ids.end(), next.features.sample_ids.begin(),
                                   next.features.sample_ids.end());
    out.labels.insert(out.labels.end(), next.labels.begin(), next.labels.end());
  }
  return out;
}

PredictionTable make_predictions(std::vector<std::string> ids, const ClassSet& classes, ProbMatrix probs) {
  if (static_cast<Eigen::Index>(ids.size()) != probs.rows()) throw DimensionError("prediction id count mismatch");
  PredictionTable p;
  p.sample_ids = std::move(ids);
  p.classes = classes;
  p.predicted = argmax_rows(probs);
  p.probs = std::move(probs);
  return p;
}

void write_predictions(const std::filesystem::path& path, const PredictionTable& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  std::vector<std::string> header = {"sample_id", "predicted_class"};
  for (const auto& c : p.classes.names()) header.push_back("p_" + c);
  out << csv::join(header) << '\n';
  for (std::size_t i = 0; i < p.sample_ids.size(); ++i) {
    out << p.sample_ids[i] << ',' << p.classes.name(p.predicted[i]);
    for (Eigen::Index j = 0; j < p.probs.cols(); ++j) {
      out << ',' << csv::format_real(p.probs(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
}

PredictionTable read_predictions(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  if (table.header.size() < 4 || table.header[0] != "sample_id" || table.header[1] != "predicted_class") {
    throw IngestError(path.string() + ": prediction CSV must start with sample_id,predicted_class and have >= 2 classes");
  }
  std::vector<std::string> names;
  for (std::size_t i = 2; i < table.header.size(); ++i) {
    if (table.header[i].rfind("p_", 0) != 0) throw IngestError(path.string() + ": column '" + table.header[i] + "' is not p_<class>");
    names.push_back(table.header[i].substr(2));
  }
  PredictionTable p;
  p.classes = ClassSet(names);
  const auto t = static_cast<Eigen::Index>(names.size());
  p.probs.resize(static_cast<Eigen::Index>(table.rows.size()), t);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.fields.size() != table.header.size()) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": wrong number of fields");
    }
    p.sample_ids.push_back(row.fields[0]);
    p.predicted.push_back(p.classes.id_of(row.fields[1]));
    for (Eigen::Index j = 0; j < t; ++j) {
      p.probs(static_cast<Eigen::Index>(r), j) = csv::parse_real(row.fields[static_cast<std::size_t>(j + 2)], row.line);
    }
  }
  try {
    check_simplex(p.probs, 1e-9);
  } catch (const Error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
  return p;
}

std::vector<int> read_truth(const std::filesystem::path& path, const std::vector<std::string>& ids,
                            const ClassSet& classes) {
  const auto table = csv::read_file(path);
  const int c_id = table.require_column("sample_id");
  const int c_label = table.column("label");
  const int c_ymrs = table.column("ymrs");
  if (c_label < 0 && c_ymrs < 0) throw IngestError(path.string() + ": needs a label or ymrs column");
  std::map<std::string, int> lookup;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": wrong number of fields");
    }
    int label = -1;
    if (c_label >= 0 && !row.fields[static_cast<std::size_t>(c_label)].empty()) {
      label = classes.id_of(row.fields[static_cast<std::size_t>(c_label)]);
    } else if (c_ymrs >= 0 && !row.fields[static_cast<std::size_t>(c_ymrs)].empty()) {
      const int y = static_cast<int>(csv::parse_int(row.fields[static_cast<std::size_t>(c_ymrs)], row.line));
      label = classes.id_of(ClassSet::bipolar_default().name(metrics::ymrs_to_class(y)));
    } else {
      continue;
    }
    lookup[row.fields[static_cast<std::size_t>(c_id)]] = label;
  }
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = lookup.find(id);
    if (it == lookup.end()) throw Error(path.string() + ": no label for sample '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace bdfusion::cli
