#include "bdfusion/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bdfusion {

ClassSet::ClassSet(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 1) throw Error("class set must not be empty");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw Error("class names must be non-empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw Error("duplicate class name '" + names_[i] + "'");
    }
  }
}

ClassSet ClassSet::bipolar_default() {
  return ClassSet({"remission", "hypomania", "mania"});
}

const std::string& ClassSet::name(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= names_.size()) {
    throw Error("class id " + std::to_string(id) + " out of range");
  }
  return names_[static_cast<std::size_t>(id)];
}

int ClassSet::id_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error("unknown class label '" + name + "'");
  return static_cast<int>(it - names_.begin());
}

bool ClassSet::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

FeatureMatrix FeatureMatrix::with_values(Matrix v) const {
  if (v.rows() != values.rows()) throw DimensionError("row count changed in with_values");
  FeatureMatrix out;
  out.values = std::move(v);
  out.sample_ids = sample_ids;
  if (out.values.cols() == values.cols()) {
    out.feature_names = feature_names;
  } else {
    out.feature_names.reserve(static_cast<std::size_t>(out.values.cols()));
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
      out.feature_names.push_back("f" + std::to_string(j));
    }
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<int>& idx) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.values.resize(static_cast<Eigen::Index>(idx.size()), values.cols());
  out.sample_ids.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(idx[i]);
    if (!sample_ids.empty()) out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(idx[i])]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_cols(const std::vector<int>& idx) const {
  FeatureMatrix out;
  out.sample_ids = sample_ids;
  out.values.resize(values.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = values.col(idx[j]);
    if (!feature_names.empty()) out.feature_names.push_back(feature_names[static_cast<std::size_t>(idx[j])]);
  }
  return out;
}

Dataset Dataset::subset(const std::vector<int>& idx) const {
  Dataset out;
  out.features = features.select_rows(idx);
  out.classes = classes;
  out.labels.reserve(idx.size());
  for (int i : idx) out.labels.push_back(labels[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> argmax_rows(const Matrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < m.cols(); ++j) {
      if (m(i, j) > m(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

void check_simplex(const ProbMatrix& p, double tol) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      if (!(p(i, j) >= 0.0)) {
        std::ostringstream os;
        os << "probability row " << i << " has negative or NaN entry";
        throw DimensionError(os.str());
      }
      sum += p(i, j);
    }
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream os;
      os << "probability row " << i << " sums to " << sum;
      throw DimensionError(os.str());
    }
  }
}

}  // namespace bdfusion
