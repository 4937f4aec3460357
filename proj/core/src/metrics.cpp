#include "bdfusion/metrics.hpp"

#include <string>

namespace bdfusion::metrics {

int ymrs_to_class(int ymrs) {
  if (ymrs < 0 || ymrs > 60) throw Error("YMRS score " + std::to_string(ymrs) + " outside 0..60");
  if (ymrs <= 7) return 0;
  if (ymrs < 20) return 1;
  return 2;
}

ConfusionMatrix confusion(const std::vector<int>& truth, const std::vector<int>& predicted, int n_classes) {
  if (truth.empty()) throw Error("confusion matrix of an empty prediction set");
  if (truth.size() != predicted.size()) {
    throw DimensionError("truth has " + std::to_string(truth.size()) + " labels, predictions " +
                         std::to_string(predicted.size()));
  }
  ConfusionMatrix cm;
  cm.counts = Eigen::MatrixXi::Zero(n_classes, n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i], p = predicted[i];
    if (t < 0 || t >= n_classes || p < 0 || p >= n_classes) {
      throw Error("label outside the declared class set at position " + std::to_string(i));
    }
    ++cm.counts(t, p);
  }
  return cm;
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
  std::vector<double> out;
  for (int i = 0; i < cm.n_classes(); ++i) {
    const int row = cm.counts.row(i).sum();
    if (row == 0) throw Error("recall undefined: class " + std::to_string(i) + " has no true samples");
    out.push_back(static_cast<double>(cm.counts(i, i)) / row);
  }
  return out;
}

double uar(const ConfusionMatrix& cm) {
  const auto r = per_class_recall(cm);
  double sum = 0.0;
  for (double v : r) sum += v;
  return sum / static_cast<double>(r.size());
}

double uar_of_probs(const std::vector<int>& truth, const ProbMatrix& probs) {
  return uar(confusion(truth, argmax_rows(probs), static_cast<int>(probs.cols())));
}

ClipDecision aggregate_task_probs(const std::map<int, RowVector>& per_task, int missing_label) {
  ClipDecision d;
  if (per_task.empty()) {
    d.label = missing_label;
    return d;
  }
  RowVector sum = RowVector::Zero(per_task.begin()->second.size());
  for (const auto& [task, row] : per_task) {
    if (row.size() != sum.size()) throw DimensionError("task probability rows differ in class count");
    sum += row;
  }
  sum /= static_cast<double>(per_task.size());
  d.label = argmax_rows(sum).front();
  d.probs = std::move(sum);
  return d;
}

}  // namespace bdfusion::metrics
