#pragma once

#include "bdfusion/common.hpp"

#include <map>
#include <optional>
#include <vector>

namespace bdfusion::metrics {

/// YMRS score (0..60) to class id of ClassSet::bipolar_default():
/// 0 remission (<= 7), 1 hypomania (8..19), 2 mania (>= 20).
int ymrs_to_class(int ymrs);

/// counts(i, j) = number of samples with true class i predicted as j.
struct ConfusionMatrix {
  Eigen::MatrixXi counts;

  int n_classes() const { return static_cast<int>(counts.rows()); }
  long total() const { return counts.sum(); }
};

/// Throws on empty input, length mismatch, or labels outside [0, n_classes).
ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted, int n_classes);

/// Recall of each true class; throws when a class has no true samples.
std::vector<double> per_class_recall(const ConfusionMatrix& cm);

/// Mean of per-class recalls.
double uar(const ConfusionMatrix& cm);

/// Convenience: uar(confusion(truth, argmax(probs))).
double uar_of_probs(const std::vector<int>& truth, const ProbMatrix& probs);

/// Outcome for one clip after combining its task-level probability rows.
struct ClipDecision {
  /// Absent when the clip had no usable task.
  std::optional<RowVector> probs;
  int label = 0;
};

/// Mean of the available task rows. With no rows the clip receives
/// `missing_label` directly.
ClipDecision aggregate_task_probs(const std::map<int, RowVector>& per_task, int missing_label);

}  // namespace bdfusion::metrics
