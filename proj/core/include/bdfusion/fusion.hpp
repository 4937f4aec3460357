#pragma once

#include "bdfusion/common.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bdfusion::fusion {

/// Decision-level output of one unimodal model.
struct ModalityOutput {
  std::string modality;
  ProbMatrix probs;
  std::vector<int> labels;
  std::optional<double> dev_uar;

  /// Fills `labels` from the argmax of `probs`.
  static ModalityOutput from_probs(std::string modality, ProbMatrix probs);
};

/// Per-sample mode of three label vectors. When all three disagree the
/// label of the `fallback` modality is used.
std::vector<int> majority_vote(const std::vector<ModalityOutput>& outputs, const std::string& fallback);

struct Blend2 {
  double alpha = 0.0;
  ProbMatrix probs;
};

/// alpha * p1 + (1 - alpha) * p2 with alpha chosen from `alpha_grid` by UAR
/// against `dev_labels`; ties go to the smallest alpha.
Blend2 weighted_sum2(const ProbMatrix& p1, const ProbMatrix& p2, const std::vector<double>& alpha_grid,
                     const std::vector<int>& dev_labels);

/// Applies fixed two-model weights.
ProbMatrix apply_weights2(const ProbMatrix& p1, const ProbMatrix& p2, double alpha);

/// Three non-negative coefficients on the simplex.
struct DirichletWeights {
  std::array<double, 3> alphas{};
};

/// Draws from the symmetric Dirichlet(1, 1, 1) distribution by normalizing
/// three unit-rate exponential variates. Deterministic per seed.
std::vector<DirichletWeights> sample_dirichlet(std::size_t n_draws, std::uint64_t seed);

ProbMatrix apply_weights3(const ProbMatrix& p1, const ProbMatrix& p2, const ProbMatrix& p3,
                          const DirichletWeights& w);

struct Blend3 {
  DirichletWeights weights;
  ProbMatrix probs;
  double uar = 0.0;
};

inline constexpr std::size_t kDefaultDirichletDraws = 500;

/// Evaluates every draw against `dev_labels` and keeps the first best one.
Blend3 weighted_sum3_search(const ProbMatrix& p1, const ProbMatrix& p2, const ProbMatrix& p3,
                            const std::vector<int>& dev_labels, std::size_t n_draws = kDefaultDirichletDraws,
                            std::uint64_t seed = 42);

/// Column-wise concatenation. Feature names are prefixed with
/// `prefixes[i] + "."` when prefixes are given. Row ids must match exactly.
FeatureMatrix early_fuse(const std::vector<FeatureMatrix>& matrices, const std::vector<std::string>& prefixes = {});

/// (uar_fusion - max(unimodal)) / max(unimodal).
double mm1(double uar_fusion, const std::vector<double>& unimodal_uars);

}  // namespace bdfusion::fusion
