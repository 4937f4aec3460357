#include "bdfusion/fusion.hpp"

#include "bdfusion/metrics.hpp"

#include <algorithm>
#include <random>

namespace bdfusion::fusion {
namespace {

void require_same_shape(const ProbMatrix& a, const ProbMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("probability matrices differ in shape (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

}  // namespace

ModalityOutput ModalityOutput::from_probs(std::string modality, ProbMatrix probs) {
  ModalityOutput out;
  out.modality = std::move(modality);
  out.labels = argmax_rows(probs);
  out.probs = std::move(probs);
  return out;
}

std::vector<int> majority_vote(const std::vector<ModalityOutput>& outputs, const std::string& fallback) {
  if (outputs.size() != 3) throw Error("majority voting needs exactly three modality outputs");
  const auto n = outputs[0].labels.size();
  for (const auto& o : outputs) {
    if (o.labels.size() != n) throw DimensionError("modality outputs differ in sample count");
  }
  auto fb = std::find_if(outputs.begin(), outputs.end(), [&](const ModalityOutput& o) { return o.modality == fallback; });
  if (fb == outputs.end()) throw Error("fallback modality '" + fallback + "' is not among the outputs");

  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int a = outputs[0].labels[i], b = outputs[1].labels[i], c = outputs[2].labels[i];
    if (a == b || a == c) {
      out[i] = a;
    } else if (b == c) {
      out[i] = b;
    } else {
      out[i] = fb->labels[i];
    }
  }
  return out;
}

ProbMatrix apply_weights2(const ProbMatrix& p1, const ProbMatrix& p2, double alpha) {
  require_same_shape(p1, p2);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("blend coefficient must lie in [0, 1]");
  if (alpha == 1.0) return p1;
  if (alpha == 0.0) return p2;
  return alpha * p1 + (1.0 - alpha) * p2;
}

Blend2 weighted_sum2(const ProbMatrix& p1, const ProbMatrix& p2, const std::vector<double>& alpha_grid,
                     const std::vector<int>& dev_labels) {
  require_same_shape(p1, p2);
  if (alpha_grid.empty()) throw Error("alpha grid must not be empty");
  std::vector<double> grid = alpha_grid;
  std::sort(grid.begin(), grid.end());
  Blend2 best;
  double best_uar = -1.0;
  for (double a : grid) {
    auto p = apply_weights2(p1, p2, a);
    const double u = metrics::uar_of_probs(dev_labels, p);
    if (u > best_uar) {
      best_uar = u;
      best.alpha = a;
      best.probs = std::move(p);
    }
  }
  return best;
}

std::vector<DirichletWeights> sample_dirichlet(std::size_t n_draws, std::uint64_t seed) {
  if (n_draws < 1) throw Error("need at least one Dirichlet draw");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_rate(1.0);
  std::vector<DirichletWeights> out(n_draws);
  for (auto& w : out) {
    double sum = 0.0;
    for (auto& a : w.alphas) {
      do {
        a = unit_rate(rng);
      } while (!(a > 0.0));
      sum += a;
    }
    for (auto& a : w.alphas) a /= sum;
  }
  return out;
}

ProbMatrix apply_weights3(const ProbMatrix& p1, const ProbMatrix& p2, const ProbMatrix& p3,
                          const DirichletWeights& w) {
  require_same_shape(p1, p2);
  require_same_shape(p1, p3);
  return w.alphas[0] * p1 + w.alphas[1] * p2 + w.alphas[2] * p3;
}

Blend3 weighted_sum3_search(const ProbMatrix& p1, const ProbMatrix& p2, const ProbMatrix& p3,
                            const std::vector<int>& dev_labels, std::size_t n_draws, std::uint64_t seed) {
  require_same_shape(p1, p2);
  require_same_shape(p1, p3);
  const auto draws = sample_dirichlet(n_draws, seed);
  Blend3 best;
  best.uar = -1.0;
  for (const auto& w : draws) {
    auto p = apply_weights3(p1, p2, p3, w);
    const double u = metrics::uar_of_probs(dev_labels, p);
    if (u > best.uar) {
      best.uar = u;
      best.weights = w;
      best.probs = std::move(p);
    }
  }
  return best;
}

FeatureMatrix early_fuse(const std::vector<FeatureMatrix>& matrices, const std::vector<std::string>& prefixes) {
  if (matrices.empty()) throw Error("early fusion needs at least one feature matrix");
  if (!prefixes.empty() && prefixes.size() != matrices.size()) {
    throw Error("early fusion prefix count does not match input count");
  }
  const auto n = matrices.front().rows();
  Eigen::Index total_cols = 0;
  for (const auto& m : matrices) {
    if (m.rows() != n) throw DimensionError("early fusion inputs differ in row count");
    if (m.sample_ids != matrices.front().sample_ids) {
      throw DimensionError("early fusion inputs differ in sample id order");
    }
    total_cols += m.cols();
  }
  FeatureMatrix out;
  out.sample_ids = matrices.front().sample_ids;
  out.values.resize(n, total_cols);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    const auto& m = matrices[i];
    out.values.middleCols(at, m.cols()) = m.values;
    at += m.cols();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::string name = j < static_cast<Eigen::Index>(m.feature_names.size())
                             ? m.feature_names[static_cast<std::size_t>(j)]
                             : "f" + std::to_string(j);
      out.feature_names.push_back(prefixes.empty() ? name : prefixes[i] + "." + name);
    }
  }
  return out;
}

double mm1(double uar_fusion, const std::vector<double>& unimodal_uars) {
  if (unimodal_uars.empty()) throw Error("MM1 needs at least one unimodal UAR");
  const double best = *std::max_element(unimodal_uars.begin(), unimodal_uars.end());
  if (!(best > 0.0)) throw Error("MM1 undefined: best unimodal UAR is zero");
  return (uar_fusion - best) / best;
}

}  // namespace bdfusion::fusion
