#pragma once

#include "bdfusion/common.hpp"

#include <cstdint>
#include <vector>

namespace bdfusion::preprocess {

/// Per-column population mean and standard deviation of a training matrix.
struct ZStats {
  Vector means;
  Vector stds;
  std::size_t fitted_on = 0;
};

/// Requires at least two rows.
ZStats fit_z(const FeatureMatrix& train);
/// (x - mean) / std per cell; zero-std columns map to 0.
FeatureMatrix apply_z(const FeatureMatrix& m, const ZStats& s);

/// Divides each row by its Euclidean norm; all-zero rows stay zero.
FeatureMatrix l2_rows(const FeatureMatrix& m);

/// Principal axes of the centered training data. `components` is k x m with
/// orthonormal columns; the largest-magnitude entry of each column is positive.
struct PcaModel {
  Matrix components;
  Vector column_means;
  Vector explained_variance_fractions;
  /// Eigenvalues of the sample covariance (divisor N-1) for kept components.
  Vector variances;

  Eigen::Index input_dim() const { return components.rows(); }
  Eigen::Index output_dim() const { return components.cols(); }
};

/// Keeps the fewest components whose cumulative explained variance reaches
/// `variance_fraction` (in (0, 1]). Singular values below 1e-10 relative to
/// the largest are treated as zero. Throws on rank-0 input.
PcaModel fit_pca(const FeatureMatrix& train, double variance_fraction);
FeatureMatrix apply_pca(const FeatureMatrix& m, const PcaModel& p);

struct TreeParams {
  int n_trees = 250;
  /// 0 means unlimited.
  int max_depth = 0;
  int min_leaf = 1;
  std::uint64_t seed = 42;
};

struct FeatureSelection {
  std::vector<int> kept_indices;
  Vector importances;
};

/// Fits an extremely randomized tree ensemble with Gini impurity and keeps
/// every feature with positive total impurity decrease. Each tree draws from
/// its own seed-derived stream.
FeatureSelection tree_feature_select(const FeatureMatrix& train, const std::vector<int>& labels,
                                     const TreeParams& params);
FeatureMatrix apply_selection(const FeatureMatrix& m, const FeatureSelection& sel);

}  // namespace bdfusion::preprocess
