#include "bdfusion/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace bdfusion::preprocess {
namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct Node {
  std::vector<int> samples;
  int depth = 0;
};

std::mt19937_64 tree_stream(std::uint64_t seed, int tree) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tree)};
  return std::mt19937_64(seq);
}

// Adds this tree's weighted impurity decreases into `importance`.
void grow_tree(const Matrix& x, const std::vector<int>& y, int n_classes, const TreeParams& params, int tree,
               Vector& importance) {
  const auto n_total = static_cast<int>(x.rows());
  const auto k = static_cast<int>(x.cols());
  const int max_features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k))));
  auto rng = tree_stream(params.seed, tree);

  std::vector<int> order(static_cast<std::size_t>(k));
  std::vector<Node> stack;
  Node root;
  root.samples.resize(static_cast<std::size_t>(n_total));
  std::iota(root.samples.begin(), root.samples.end(), 0);
  stack.push_back(std::move(root));

  std::vector<int> counts(static_cast<std::size_t>(n_classes));
  std::vector<int> left_counts(static_cast<std::size_t>(n_classes));

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    const int n = static_cast<int>(node.samples.size());

    std::fill(counts.begin(), counts.end(), 0);
    for (int s : node.samples) ++counts[static_cast<std::size_t>(y[static_cast<std::size_t>(s)])];
    const double node_gini = gini(counts, n);
    if (node_gini <= 0.0) continue;
    if (n < 2 * params.min_leaf) continue;
    if (params.max_depth > 0 && node.depth >= params.max_depth) continue;

    std::iota(order.begin(), order.end(), 0);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_decrease = -1.0;
    int evaluated = 0;
    for (int pos = 0; pos < k; ++pos) {
      if (evaluated >= max_features && best_feature >= 0) break;
      std::uniform_int_distribution<int> pick(pos, k - 1);
      std::swap(order[static_cast<std::size_t>(pos)], order[static_cast<std::size_t>(pick(rng))]);
      const int f = order[static_cast<std::size_t>(pos)];

      double lo = x(node.samples.front(), f), hi = lo;
      for (int s : node.samples) {
        lo = std::min(lo, x(s, f));
        hi = std::max(hi, x(s, f));
      }
      if (!(hi > lo)) continue;
      ++evaluated;
      std::uniform_real_distribution<double> draw(lo, hi);
      const double threshold = draw(rng);

      std::fill(left_counts.begin(), left_counts.end(), 0);
      int n_left = 0;
      for (int s : node.samples) {
        if (x(s, f) <= threshold) {
          ++left_counts[static_cast<std::size_t>(y[static_cast<std::size_t>(s)])];
          ++n_left;
        }
      }
      const int n_right = n - n_left;
      if (n_left < params.min_leaf || n_right < params.min_leaf) continue;
      std::vector<int> right_counts(counts);
      for (std::size_t c = 0; c < right_counts.size(); ++c) right_counts[c] -= left_counts[c];
      const double decrease =
          static_cast<double>(n) / n_total *
          (node_gini - static_cast<double>(n_left) / n * gini(left_counts, n_left) -
           static_cast<double>(n_right) / n * gini(right_counts, n_right));
      if (decrease > best_decrease) {
        best_decrease = decrease;
        best_feature = f;
        best_threshold = threshold;
      }
    }
    if (best_feature < 0) continue;

    importance(best_feature) += std::max(0.0, best_decrease);
    Node left, right;
    left.depth = right.depth = node.depth + 1;
    for (int s : node.samples) {
      (x(s, best_feature) <= best_threshold ? left : right).samples.push_back(s);
    }
    stack.push_back(std::move(right));
    stack.push_back(std::move(left));
  }
}

}  // namespace

FeatureSelection tree_feature_select(const FeatureMatrix& train, const std::vector<int>& labels,
                                     const TreeParams& params) {
  if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
    throw DimensionError("label count does not match training rows");
  }
  if (params.n_trees < 1) throw Error("tree ensemble needs at least one tree");
  if (params.min_leaf < 1) throw Error("min_leaf must be at least 1");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw Error("tree feature selection needs at least 2 classes");
  if (*distinct.begin() < 0) throw Error("class ids must be non-negative");
  const int n_classes = *distinct.rbegin() + 1;

  Vector importance = Vector::Zero(train.cols());
  for (int t = 0; t < params.n_trees; ++t) {
    grow_tree(train.values, labels, n_classes, params, t, importance);
  }
  const double total = importance.sum();
  if (!(total > 0.0)) throw Error("tree ensemble found no informative split");

  FeatureSelection sel;
  sel.importances = importance / total;
  for (Eigen::Index j = 0; j < sel.importances.size(); ++j) {
    if (sel.importances(j) > 0.0) sel.kept_indices.push_back(static_cast<int>(j));
  }
  return sel;
}

}  // namespace bdfusion::preprocess
