#include "bdfusion/pipeline.hpp"

#include "bdfusion/csv.hpp"

#include <cmath>

namespace bdfusion::pipeline {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kelm: return "kelm";
    case ModelKind::wkelm: return "wkelm";
    case ModelKind::fused: return "fused";
  }
  return "?";
}

const char* to_string(FusionMethod m) {
  switch (m) {
    case FusionMethod::majority: return "majority";
    case FusionMethod::wsum2: return "wsum2";
    case FusionMethod::wsum3: return "wsum3";
    case FusionMethod::early: return "early";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "kelm") return ModelKind::kelm;
  if (s == "wkelm") return ModelKind::wkelm;
  if (s == "fused") return ModelKind::fused;
  throw Error("unknown model kind '" + s + "' (expected kelm, wkelm or fused)");
}

FusionMethod fusion_method_from_string(const std::string& s) {
  if (s == "majority") return FusionMethod::majority;
  if (s == "wsum2") return FusionMethod::wsum2;
  if (s == "wsum3") return FusionMethod::wsum3;
  if (s == "early") return FusionMethod::early;
  throw Error("unknown fusion method '" + s + "' (expected majority, wsum2, wsum3 or early)");
}

GammaChoice GammaChoice::parse(const std::string& s) {
  if (s == "median") return median_heuristic();
  const double v = csv::parse_real(s, 0);
  if (!(v > 0.0)) throw Error("gamma must be positive, got '" + s + "'");
  return fixed(v);
}

double GammaChoice::resolve(const Matrix& train) const {
  return median ? kelm::median_heuristic_gamma(train) : value;
}

std::string GammaChoice::to_string() const {
  return median ? std::string("median") : csv::format_real(value);
}

bool GammaChoice::operator<(const GammaChoice& o) const {
  if (median != o.median) return !median;
  return value < o.value;
}

std::map<std::string, std::string> KernelParams::describe(ModelKind kind) const {
  std::map<std::string, std::string> out;
  out["model"] = pipeline::to_string(kind);
  out["gamma"] = gamma.to_string();
  switch (kind) {
    case ModelKind::kelm:
    case ModelKind::wkelm:
      out["C"] = csv::format_real(C);
      break;
    case ModelKind::fused:
      out["C"] = csv::format_real(C);
      out["C_weighted"] = csv::format_real(C_weighted);
      out["alpha"] = csv::format_real(alpha);
      break;
  }
  return out;
}

std::vector<GammaChoice> PipelineConfig::default_gamma_grid() {
  std::vector<GammaChoice> g;
  for (int e = -10; e <= 2; ++e) g.push_back(GammaChoice::fixed(std::ldexp(1.0, e)));
  g.push_back(GammaChoice::median_heuristic());
  return g;
}

void PipelineConfig::validate() const {
  if (functional_set != "bd10") throw Error("unknown functional set '" + functional_set + "'");
  if (C_grid.empty()) throw Error("C grid must not be empty");
  for (double c : C_grid) {
    if (!(c > 0.0)) throw Error("C grid values must be positive");
  }
  if (gamma_grid.empty()) throw Error("gamma grid must not be empty");
  if (alpha_grid.empty()) throw Error("alpha grid must not be empty");
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw Error("alpha grid values must lie in [0, 1]");
  }
  if (dirichlet_draws < 1) throw Error("dirichlet draw count must be at least 1");
  if (folds < 2) throw Error("fold count must be at least 2");
  if (!(pca_variance > 0.0 && pca_variance <= 1.0)) throw Error("pca_variance must lie in (0, 1]");
  if (tree.n_trees < 1) throw Error("tree count must be at least 1");
  if (classes.size() < 2) throw Error("need at least two classes");
  if (fixed_params) {
    if (!(fixed_params->C > 0.0) || !(fixed_params->C_weighted > 0.0)) throw Error("C must be positive");
    if (!(fixed_params->alpha >= 0.0 && fixed_params->alpha <= 1.0)) throw Error("alpha must lie in [0, 1]");
  }
}

Preprocessor Preprocessor::fit(const Dataset& train, const PipelineConfig& cfg) {
  Preprocessor p;
  p.input_dim = train.features.cols();
  FeatureMatrix x = train.features;
  if (cfg.pca) {
    p.pca = preprocess::fit_pca(x, cfg.pca_variance);
    x = preprocess::apply_pca(x, *p.pca);
  }
  if (cfg.tree_select) {
    p.selection = preprocess::tree_feature_select(x, train.labels, cfg.tree);
    x = preprocess::apply_selection(x, *p.selection);
  }
  if (cfg.zscore) p.z = preprocess::fit_z(x);
  p.l2 = cfg.l2;
  return p;
}

FeatureMatrix Preprocessor::apply(const FeatureMatrix& m) const {
  if (m.cols() != input_dim) {
    throw DimensionError("pipeline expects " + std::to_string(input_dim) + " raw features, got " +
                         std::to_string(m.cols()));
  }
  FeatureMatrix x = m;
  if (pca) x = preprocess::apply_pca(x, *pca);
  if (selection) x = preprocess::apply_selection(x, *selection);
  if (z) x = preprocess::apply_z(x, *z);
  if (l2) x = preprocess::l2_rows(x);
  return x;
}

Eigen::Index Preprocessor::output_dim() const {
  Eigen::Index d = input_dim;
  if (pca) d = pca->output_dim();
  if (selection) d = static_cast<Eigen::Index>(selection->kept_indices.size());
  return d;
}

TrainedModel fit(const Dataset& train, const PipelineConfig& cfg, const KernelParams& params) {
  TrainedModel m;
  m.prep = Preprocessor::fit(train, cfg);
  m.kind = cfg.model;
  m.params = params;
  m.classes = train.classes;
  const Matrix x = m.prep.apply(train.features).values;
  m.gamma_value = params.gamma.resolve(x);
  const int t = static_cast<int>(train.classes.size());
  switch (cfg.model) {
    case ModelKind::kelm:
      m.model = kelm::train_kelm(x, train.labels, t, params.C, m.gamma_value, kelm::Weighting::unweighted);
      break;
    case ModelKind::wkelm:
      m.model = kelm::train_kelm(x, train.labels, t, params.C, m.gamma_value, kelm::Weighting::class_weighted);
      break;
    case ModelKind::fused: {
      kelm::FusedElm f;
      f.unweighted = kelm::train_kelm(x, train.labels, t, params.C, m.gamma_value, kelm::Weighting::unweighted);
      f.weighted =
          kelm::train_kelm(x, train.labels, t, params.C_weighted, m.gamma_value, kelm::Weighting::class_weighted);
      f.alpha = params.alpha;
      m.model = std::move(f);
      break;
    }
  }
  return m;
}

ProbMatrix predict_probs(const TrainedModel& m, const FeatureMatrix& x) {
  const Matrix z = m.prep.apply(x).values;
  return std::visit([&](const auto& model) { return kelm::predict_probs(model, z); }, m.model);
}

}  // namespace bdfusion::pipeline
