#pragma once

#include "bdfusion/common.hpp"
#include "bdfusion/metrics.hpp"
#include "bdfusion/pipeline.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bdfusion::eval {

/// Held-out index sets. Each fold is evaluated with every sample outside it
/// as training data.
struct FoldPlan {
  std::vector<std::vector<int>> folds;
  std::uint64_t seed = 0;
  bool stratified = false;
  std::size_t n_samples = 0;

  std::size_t k() const { return folds.size(); }
  /// Sorted complement of fold `i` within [0, n_samples).
  std::vector<int> train_indices(std::size_t i) const;
  /// FNV-1a over (n, fold sizes, fold members), rendered as 16 hex digits.
  std::string digest() const;
};

/// Seeded shuffle then round-robin assignment, within each class when
/// `stratified`. Fold members are sorted.
FoldPlan make_folds(const std::vector<int>& labels, int k, std::uint64_t seed, bool stratified);

/// Single development fold: train on `train_idx`, evaluate on `dev_idx`.
FoldPlan holdout_plan(std::size_t n_samples, const std::vector<int>& dev_idx);

struct EvalReport {
  metrics::ConfusionMatrix confusion;
  std::vector<double> per_class_recall;
  double uar = 0.0;
  std::vector<std::string> class_names;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  std::string fold_plan_digest;
  /// Extra numeric entries (e.g. mm1, unimodal uars).
  std::map<std::string, double> extras;
  /// Effective configuration, echoed for provenance.
  std::map<std::string, std::string> config;

  /// {uar, per_class_recall, confusion, params, seed, fold_plan_digest, ...}
  std::string to_json() const;
};

EvalReport make_report(const std::vector<int>& truth, const std::vector<int>& predicted, const ClassSet& classes);

/// Fits on a training partition and returns probabilities for the held-out rows.
using FoldModel = std::function<ProbMatrix(const Dataset& train, const Dataset& held_out)>;

struct CvResult {
  EvalReport report;
  /// Held-out probabilities for every row covered by the plan; other rows are zero.
  ProbMatrix pooled_probs;
  /// Rows covered by some fold, ascending.
  std::vector<int> covered;
};

/// Runs every fold and scores the pooled held-out predictions as one set.
CvResult cross_validate(const Dataset& data, const FoldModel& model, const FoldPlan& plan);
CvResult cross_validate(const Dataset& data, const pipeline::PipelineConfig& cfg,
                        const pipeline::KernelParams& params, const FoldPlan& plan);

struct GridResult {
  pipeline::KernelParams best;
  CvResult cv;
  std::size_t candidates_evaluated = 0;
  std::size_t candidates_failed = 0;
};

/// Exhaustive search over cfg's C, gamma (and for the fused model alpha and
/// weighted-C) grids scored by pooled held-out UAR. Preprocessing is fitted
/// once per fold. Ties go to the smallest C, then gamma, then alpha.
/// Candidates whose kernel system is singular are skipped.
GridResult grid_search(const Dataset& data, const pipeline::PipelineConfig& cfg, const FoldPlan& plan);

}  // namespace bdfusion::eval
