#pragma once

#include "bdfusion/common.hpp"
#include "bdfusion/kelm.hpp"
#include "bdfusion/preprocess.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bdfusion::pipeline {

enum class ModelKind { kelm, wkelm, fused };
enum class FusionMethod { majority, wsum2, wsum3, early };

const char* to_string(ModelKind k);
const char* to_string(FusionMethod m);
ModelKind model_kind_from_string(const std::string& s);
FusionMethod fusion_method_from_string(const std::string& s);

/// A kernel width: either a fixed value or the median heuristic, resolved
/// against whatever training matrix the model is fitted on.
struct GammaChoice {
  double value = 0.0;
  bool median = false;

  static GammaChoice fixed(double v) { return {v, false}; }
  static GammaChoice median_heuristic() { return {0.0, true}; }
  static GammaChoice parse(const std::string& s);

  double resolve(const Matrix& train) const;
  std::string to_string() const;

  /// Fixed values ascending, the heuristic last.
  bool operator<(const GammaChoice& o) const;
  bool operator==(const GammaChoice&) const = default;
};

/// Hyperparameters of one kernel ELM configuration. `C_weighted` and `alpha`
/// only matter for the fused model.
struct KernelParams {
  double C = 1.0;
  double C_weighted = 1.0;
  GammaChoice gamma = GammaChoice::fixed(1.0);
  double alpha = 1.0;

  std::map<std::string, std::string> describe(ModelKind kind) const;
};

/// Every per-experiment choice in one place. Defaults follow the
/// experiments: BD10 summaries, Z then L2 normalization, fused ELM with the
/// standard grids, stratified 4-fold CV.
struct PipelineConfig {
  std::string functional_set = "bd10";
  bool pca = false;
  double pca_variance = 0.99;
  bool tree_select = false;
  preprocess::TreeParams tree;
  bool zscore = true;
  bool l2 = true;

  ModelKind model = ModelKind::fused;
  std::vector<double> C_grid = {1, 10, 100, 1000, 10000, 100000};
  std::vector<GammaChoice> gamma_grid = default_gamma_grid();
  std::vector<double> alpha_grid = kelm::default_alpha_grid();
  /// Fixed parameters for `train` without search.
  std::optional<KernelParams> fixed_params;

  FusionMethod fusion = FusionMethod::majority;
  std::string fallback_modality = "acoustic";
  std::uint64_t seed = 42;
  std::size_t dirichlet_draws = 500;
  int folds = 4;
  bool stratified = true;
  ClassSet classes = ClassSet::bipolar_default();

  /// 2^-10 ... 2^2 and the median heuristic.
  static std::vector<GammaChoice> default_gamma_grid();

  /// Throws Error on empty grids, a zero draw count or out-of-range values.
  void validate() const;
};

/// Fitted preprocessing chain: PCA -> tree selection -> Z -> L2, each step
/// optional and fitted on training rows only.
struct Preprocessor {
  Eigen::Index input_dim = 0;
  std::optional<preprocess::PcaModel> pca;
  std::optional<preprocess::FeatureSelection> selection;
  std::optional<preprocess::ZStats> z;
  bool l2 = false;

  static Preprocessor fit(const Dataset& train, const PipelineConfig& cfg);
  FeatureMatrix apply(const FeatureMatrix& m) const;
  /// Dimension after every step.
  Eigen::Index output_dim() const;
};

struct TrainedModel {
  Preprocessor prep;
  ModelKind kind = ModelKind::kelm;
  KernelParams params;
  /// gamma after resolving the heuristic against the training matrix.
  double gamma_value = 1.0;
  std::variant<kelm::KelmModel, kelm::FusedElm> model;
  ClassSet classes;
};

/// Fits preprocessing and the configured kernel model on `train`.
TrainedModel fit(const Dataset& train, const PipelineConfig& cfg, const KernelParams& params);

/// Class probabilities for raw (pre-preprocessing) features.
ProbMatrix predict_probs(const TrainedModel& m, const FeatureMatrix& x);

}  // namespace bdfusion::pipeline
