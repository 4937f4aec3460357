#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library's code paths and Eigen's decompositions: plain loops over
// std::vector storage.

#include <bdfusion/common.hpp>

#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

Dense to_dense(const bdfusion::Matrix& m);
bdfusion::Matrix from_dense(const Dense& d);

Dense multiply(const Dense& a, const Dense& b);

/// Gauss-Jordan inverse with partial pivoting.
Dense inverse(Dense a);

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Eigenvalues
/// are returned in descending order, eigenvectors as columns of `vectors`.
struct EigenPairs {
  std::vector<double> values;
  Dense vectors;
};
EigenPairs jacobi_eigen(Dense a, double tol = 1e-14, int max_sweeps = 100);

/// Sample covariance (divisor N-1) of the columns of `x`.
Dense covariance(const bdfusion::Matrix& x);

/// Brute-force kernel ELM output weights: inverse(I/C + W K) * W T, with
/// W = diag(weights) (all ones for the unweighted form).
bdfusion::Matrix kelm_beta(const bdfusion::Matrix& x, const std::vector<int>& labels, int n_classes, double C,
                           double gamma, const std::vector<double>& weights);

/// Normal-equation polynomial fit of `y` over t_i = i/(F-1); returns
/// coefficients {c0, c1, ..., c_degree}.
std::vector<double> polyfit(const std::vector<double>& y, int degree);

/// Leave-fold-out nearest centroid accuracy proxy: pooled UAR of a
/// Euclidean nearest-centroid classifier over the given folds.
double nearest_centroid_uar(const bdfusion::Matrix& x, const std::vector<int>& labels, int n_classes,
                            const std::vector<std::vector<int>>& folds);

/// Nearest-centroid UAR on `test` with centroids from `train`.
double nearest_centroid_holdout_uar(const bdfusion::Matrix& train, const std::vector<int>& train_labels,
                                    const bdfusion::Matrix& test, const std::vector<int>& test_labels, int n_classes);

/// Plain recall-average from label vectors.
double uar(const std::vector<int>& truth, const std::vector<int>& pred, int n_classes);

bdfusion::Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed);

}  // namespace oracle
