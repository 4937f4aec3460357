#pragma once

#include "bdfusion/common.hpp"

#include <vector>

namespace bdfusion::kelm {

/// exp(-gamma * ||x_i - y_j||^2) for every row pair.
Matrix rbf_kernel(const Matrix& x, const Matrix& y, double gamma);

/// Median of squared pairwise distances between distinct rows, inverted.
/// Used as a data-driven kernel width; falls back to 1 when all rows coincide.
double median_heuristic_gamma(const Matrix& x);

/// One-hot targets with +1 on the true class and -1 elsewhere.
Matrix make_targets(const std::vector<int>& labels, int n_classes);

enum class Weighting { unweighted, class_weighted };

const char* to_string(Weighting w);
Weighting weighting_from_string(const std::string& s);

/// Trained kernel ELM. `beta` solves (I/C + K) beta = T, or in the class
/// weighted case (I/C + W K) beta = W T with W_ii = 1 / |class of i|.
struct KelmModel {
  Matrix train_matrix;
  Matrix beta;
  double gamma = 1.0;
  double C = 1.0;
  Weighting weighting = Weighting::unweighted;
  int n_classes = 0;
};

/// Per-sample weights 1 / (count of training samples sharing the label).
Vector class_weights(const std::vector<int>& labels, int n_classes);

/// Solves for the output weights with a Cholesky factorization of the
/// symmetric system (W^-1 / C + K) beta = T, which is algebraically the
/// weighted form above. Throws SolveError when the reciprocal condition
/// estimate drops below 1e-14.
KelmModel train_kelm(const Matrix& train, const std::vector<int>& labels, int n_classes, double C, double gamma,
                     Weighting weighting);

/// Same as train_kelm with explicit per-sample weights (diagonal of W).
KelmModel train_kelm_weighted(const Matrix& train, const std::vector<int>& labels, int n_classes, double C,
                              double gamma, const Vector& sample_weights);

/// Solves with a precomputed training kernel; `sample_weights` empty means
/// unweighted.
Matrix solve_beta(const Matrix& kernel, const Matrix& targets, double C, const Vector& sample_weights);

/// rbf_kernel(x, train_matrix, gamma) * beta.
Matrix predict_scores(const KelmModel& m, const Matrix& x);

/// Row-wise softmax.
ProbMatrix scores_to_probs(const Matrix& scores);

ProbMatrix predict_probs(const KelmModel& m, const Matrix& x);

/// alpha * P_unweighted + (1 - alpha) * P_weighted.
ProbMatrix blend(const ProbMatrix& p_unweighted, const ProbMatrix& p_weighted, double alpha);

/// Unweighted and class-weighted models over the same training data with a
/// blend coefficient picked on a development set.
struct FusedElm {
  KelmModel unweighted;
  KelmModel weighted;
  double alpha = 0.5;
};

/// 0.00, 0.05, ..., 1.00.
std::vector<double> default_alpha_grid();

/// Trains both sub-models and keeps the alpha with the best development UAR
/// (smallest alpha on ties).
FusedElm train_fused_elm(const Matrix& train, const std::vector<int>& labels, const Matrix& dev,
                         const std::vector<int>& dev_labels, int n_classes, double C_unweighted,
                         double C_weighted, double gamma, const std::vector<double>& alpha_grid);

ProbMatrix predict_probs(const FusedElm& m, const Matrix& x);

/// Index of the alpha in `grid` maximizing UAR of the blend against `labels`.
std::size_t select_alpha(const ProbMatrix& p_unweighted, const ProbMatrix& p_weighted,
                         const std::vector<int>& labels, int n_classes, const std::vector<double>& grid);

}  // namespace bdfusion::kelm
