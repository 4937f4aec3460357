#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdfusion {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Base for every error raised by the library. The message is a single line
/// suitable for a CLI diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading tables from disk or streams.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Raised when matrix shapes or dimension chains do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a linear system is too ill-conditioned to solve.
class SolveError : public Error {
 public:
  using Error::Error;
};

/// Ordered list of class names; the index into it is the class id used
/// everywhere else.
class ClassSet {
 public:
  ClassSet() = default;
  explicit ClassSet(std::vector<std::string> names);

  /// (remission, hypomania, mania).
  static ClassSet bipolar_default();

  std::size_t size() const { return names_.size(); }
  const std::string& name(int id) const;
  const std::vector<std::string>& names() const { return names_; }

  /// Throws Error for names not in the set.
  int id_of(const std::string& name) const;
  bool contains(const std::string& name) const;

  /// The middle class, used for clips with no usable task.
  int middle() const { return static_cast<int>((names_.size() - 1) / 2); }

  bool operator==(const ClassSet&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Rows are samples, columns named features; sample ids travel with the rows.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> feature_names;
  std::vector<std::string> sample_ids;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Same names and ids, new values (shape must keep row count).
  FeatureMatrix with_values(Matrix v) const;
  FeatureMatrix select_rows(const std::vector<int>& idx) const;
  FeatureMatrix select_cols(const std::vector<int>& idx) const;
};

/// A labelled feature table.
struct Dataset {
  FeatureMatrix features;
  std::vector<int> labels;
  ClassSet classes;

  std::size_t size() const { return labels.size(); }
  Dataset subset(const std::vector<int>& idx) const;
};

/// N x t matrix of class probabilities, one simplex row per sample.
using ProbMatrix = Matrix;

/// Row-wise argmax; ties resolve to the lowest class id.
std::vector<int> argmax_rows(const Matrix& m);

/// Throws DimensionError unless every row is non-negative and sums to 1
/// within `tol`.
void check_simplex(const ProbMatrix& p, double tol = 1e-9);

}  // namespace bdfusion
