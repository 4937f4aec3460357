#include <bdfusion/eval.hpp>
#include <bdfusion/metrics.hpp>
#include <bdfusion/synth.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace bdfusion;
using namespace bdfusion::metrics;

namespace {

Dataset gaussian_classes(int per_class, double spread, std::uint64_t seed) {
  const int n = 3 * per_class;
  Matrix x = oracle::gaussian_matrix(n, 4, seed);
  Dataset d;
  d.classes = ClassSet::bipolar_default();
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    d.labels.push_back(c);
    x(i, c) += spread;
    d.features.sample_ids.push_back("s" + std::to_string(i));
  }
  d.features.values = x;
  d.features.feature_names = {"a", "b", "c", "d"};
  return d;
}

}  // namespace

TEST(Ymrs, Boundaries) {
  EXPECT_EQ(ymrs_to_class(0), 0);
  EXPECT_EQ(ymrs_to_class(7), 0);
  EXPECT_EQ(ymrs_to_class(8), 1);
  EXPECT_EQ(ymrs_to_class(19), 1);
  EXPECT_EQ(ymrs_to_class(20), 2);
  EXPECT_EQ(ymrs_to_class(60), 2);
  EXPECT_THROW(ymrs_to_class(61), Error);
  EXPECT_THROW(ymrs_to_class(-1), Error);
}

TEST(Confusion, HandCount) {
  const auto cm = confusion({0, 0, 1}, {0, 1, 1}, 2);
  Eigen::MatrixXi expect(2, 2);
  expect << 1, 1, 0, 1;
  EXPECT_EQ(cm.counts, expect);
  EXPECT_EQ(cm.total(), 3);
}

TEST(Confusion, PerfectIsDiagonalAndErrors) {
  const auto cm = confusion({0, 1, 2, 2}, {0, 1, 2, 2}, 3);
  EXPECT_TRUE(cm.counts.isDiagonal());
  EXPECT_THROW(confusion({}, {}, 3), Error);
  EXPECT_THROW(confusion({0}, {0, 1}, 3), Error);
  EXPECT_THROW(confusion({0}, {3}, 3), Error);
}

TEST(Uar, Examples) {
  metrics::ConfusionMatrix cm;
  cm.counts.resize(3, 3);
  cm.counts << 2, 1, 0, 0, 3, 1, 1, 0, 4;
  EXPECT_NEAR(uar(cm), (2.0 / 3 + 3.0 / 4 + 4.0 / 5) / 3, 1e-15);
  EXPECT_NEAR(uar(cm), 0.7389, 1e-4);
  EXPECT_EQ(uar(confusion({0, 1, 2}, {0, 1, 2}, 3)), 1.0);
  std::vector<int> truth;
  for (int i = 0; i < 30; ++i) truth.push_back(i % 3);
  EXPECT_NEAR(uar(confusion(truth, std::vector<int>(30, 1), 3)), 1.0 / 3, 1e-15);
  cm.counts.row(1).setZero();
  EXPECT_THROW(uar(cm), Error);
}

TEST(Uar, SelfAgreementAndRelabelInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(0, 3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> y, p;
    for (int i = 0; i < 40; ++i) {
      y.push_back(i % 4);
      p.push_back(c(rng));
    }
    EXPECT_EQ(uar(confusion(y, y, 4)), 1.0);
    const std::vector<int> perm = {2, 0, 3, 1};
    std::vector<int> y2, p2;
    for (int i = 0; i < 40; ++i) {
      y2.push_back(perm[y[i]]);
      p2.push_back(perm[p[i]]);
    }
    EXPECT_NEAR(uar(confusion(y, p, 4)), uar(confusion(y2, p2, 4)), 1e-15);
    EXPECT_NEAR(uar(confusion(y, p, 4)), oracle::uar(y, p, 4), 1e-15);
  }
}

TEST(Aggregate, TaskMeans) {
  RowVector a(3), b(3);
  a << 1, 0, 0;
  b << 0, 0, 1;
  const auto one = aggregate_task_probs({{1, a}}, 1);
  EXPECT_EQ(*one.probs, a);
  const auto two = aggregate_task_probs({{1, a}, {5, b}}, 1);
  EXPECT_NEAR((*two.probs)(0), 0.5, 1e-15);
  EXPECT_EQ((*two.probs)(1), 0.0);
  EXPECT_NEAR((*two.probs)(2), 0.5, 1e-15);
  const auto none = aggregate_task_probs({}, ClassSet::bipolar_default().middle());
  EXPECT_FALSE(none.probs);
  EXPECT_EQ(ClassSet::bipolar_default().name(none.label), "hypomania");
}

TEST(Folds, FourFoldsOf164) {
  std::vector<int> labels(164);
  for (int i = 0; i < 164; ++i) labels[i] = i < 60 ? 0 : (i < 120 ? 1 : 2);
  for (bool strat : {false, true}) {
    const auto plan = eval::make_folds(labels, 4, 42, strat);
    ASSERT_EQ(plan.k(), 4u);
    for (std::size_t f = 0; f < 4; ++f) {
      EXPECT_EQ(plan.folds[f].size(), 41u);
      EXPECT_EQ(plan.train_indices(f).size(), 123u);
    }
  }
}

TEST(Folds, PartitionAndBalance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const int n = 30 + static_cast<int>(seed);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng() % 3);
    for (int c = 0; c < 3; ++c) labels[c] = c;
    for (int k : {2, 3, 5}) {
      const auto plan = eval::make_folds(labels, k, seed, false);
      std::set<int> all;
      std::size_t lo = 1000, hi = 0;
      for (const auto& f : plan.folds) {
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
        all.insert(f.begin(), f.end());
      }
      EXPECT_EQ(all.size(), static_cast<std::size_t>(n));
      EXPECT_LE(hi - lo, 1u);
    }
    // Stratified needs >= k per class.
    std::vector<int> strat(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) strat[i] = i % 3;
    const auto plan = eval::make_folds(strat, 4, seed, true);
    for (int c = 0; c < 3; ++c) {
      std::vector<int> per;
      for (const auto& f : plan.folds)
        per.push_back(static_cast<int>(std::count_if(f.begin(), f.end(), [&](int i) { return strat[i] == c; })));
      EXPECT_LE(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()), 1);
    }
    std::size_t lo = 1000, hi = 0;
    for (const auto& f : plan.folds) {
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    EXPECT_LE(hi - lo, 1u);
  }
}

TEST(Folds, LeaveOneOutDeterminismAndErrors) {
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  const auto loo = eval::make_folds(labels, 6, 1, false);
  for (const auto& f : loo.folds) EXPECT_EQ(f.size(), 1u);
  EXPECT_EQ(eval::make_folds(labels, 3, 9, true).folds, eval::make_folds(labels, 3, 9, true).folds);
  EXPECT_EQ(eval::make_folds(labels, 3, 9, true).digest(), eval::make_folds(labels, 3, 9, true).digest());
  EXPECT_EQ(eval::make_folds(labels, 3, 9, true).digest().size(), 16u);
  EXPECT_THROW(eval::make_folds(labels, 1, 0, false), Error);
  EXPECT_THROW(eval::make_folds(labels, 7, 0, false), Error);
  EXPECT_THROW(eval::make_folds(labels, 4, 0, true), Error);
}

TEST(CrossValidate, StubModels) {
  const auto d = gaussian_classes(10, 0.0, 1);
  const auto plan = eval::make_folds(d.labels, 4, 42, true);
  const eval::FoldModel oracle_stub = [](const Dataset&, const Dataset& held) {
    ProbMatrix p = ProbMatrix::Zero(static_cast<Eigen::Index>(held.size()), 3);
    for (std::size_t i = 0; i < held.size(); ++i) p(static_cast<Eigen::Index>(i), held.labels[i]) = 1.0;
    return p;
  };
  EXPECT_EQ(eval::cross_validate(d, oracle_stub, plan).report.uar, 1.0);
  const eval::FoldModel constant = [](const Dataset&, const Dataset& held) {
    ProbMatrix p = ProbMatrix::Zero(static_cast<Eigen::Index>(held.size()), 3);
    p.col(2).setOnes();
    return p;
  };
  EXPECT_NEAR(eval::cross_validate(d, constant, plan).report.uar, 1.0 / 3, 1e-15);
}

TEST(CrossValidate, PoolingIsOrderIndependent) {
  const auto d = gaussian_classes(8, 1.5, 3);
  const auto plan = eval::make_folds(d.labels, 2, 4, true);
  eval::FoldPlan swapped = plan;
  std::swap(swapped.folds[0], swapped.folds[1]);
  pipeline::PipelineConfig cfg;
  pipeline::KernelParams params;
  params.C = 10;
  params.gamma = pipeline::GammaChoice::fixed(0.5);
  cfg.model = pipeline::ModelKind::kelm;
  const auto a = eval::cross_validate(d, cfg, params, plan);
  const auto b = eval::cross_validate(d, cfg, params, swapped);
  EXPECT_EQ(a.report.uar, b.report.uar);
  EXPECT_EQ(a.pooled_probs, b.pooled_probs);
}

TEST(CrossValidate, SeparableSyntheticReachesNinety) {
  const auto d = gaussian_classes(40, 5.0, 11);
  const auto plan = eval::make_folds(d.labels, 4, 42, true);
  ASSERT_GT(oracle::nearest_centroid_uar(d.features.values, d.labels, 3, plan.folds), 0.95);
  pipeline::PipelineConfig cfg;
  const auto g = eval::grid_search(d, cfg, plan);
  EXPECT_GE(g.cv.report.uar, 0.90);
  check_simplex(g.cv.pooled_probs);
}

TEST(GridSearch, SingletonEqualsCrossValidate) {
  const auto d = gaussian_classes(10, 1.0, 6);
  const auto plan = eval::make_folds(d.labels, 4, 42, true);
  pipeline::PipelineConfig cfg;
  cfg.C_grid = {10};
  cfg.gamma_grid = {pipeline::GammaChoice::fixed(0.25)};
  cfg.alpha_grid = {0.5};
  const auto g = eval::grid_search(d, cfg, plan);
  pipeline::KernelParams p;
  p.C = 10;
  p.C_weighted = 10;
  p.gamma = pipeline::GammaChoice::fixed(0.25);
  p.alpha = 0.5;
  const auto cv = eval::cross_validate(d, cfg, p, plan);
  EXPECT_EQ(g.cv.report.uar, cv.report.uar);
  EXPECT_LT((g.cv.pooled_probs - cv.pooled_probs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(g.candidates_evaluated, 1u);
}

TEST(GridSearch, BestDominatesEveryPointAndIsDeterministic) {
  const auto d = gaussian_classes(12, 0.8, 8);
  const auto plan = eval::make_folds(d.labels, 4, 42, true);
  pipeline::PipelineConfig cfg;
  cfg.model = pipeline::ModelKind::wkelm;
  cfg.C_grid = {1, 100};
  cfg.gamma_grid = {pipeline::GammaChoice::fixed(0.125), pipeline::GammaChoice::fixed(1.0),
                    pipeline::GammaChoice::median_heuristic()};
  const auto g = eval::grid_search(d, cfg, plan);
  for (double c : cfg.C_grid) {
    for (const auto& gm : cfg.gamma_grid) {
      pipeline::KernelParams p;
      p.C = c;
      p.gamma = gm;
      EXPECT_GE(g.cv.report.uar, eval::cross_validate(d, cfg, p, plan).report.uar);
    }
  }
  const auto again = eval::grid_search(d, cfg, plan);
  EXPECT_EQ(again.best.C, g.best.C);
  EXPECT_EQ(again.best.gamma, g.best.gamma);
  EXPECT_EQ(again.cv.report.to_json(), g.cv.report.to_json());
}

TEST(GridSearch, TiesPreferSmallestC) {
  const auto d = gaussian_classes(10, 6.0, 2);
  const auto plan = eval::make_folds(d.labels, 2, 42, true);
  pipeline::PipelineConfig cfg;
  cfg.model = pipeline::ModelKind::kelm;
  cfg.C_grid = {1000, 10, 100};
  cfg.gamma_grid = {pipeline::GammaChoice::fixed(0.5)};
  const auto g = eval::grid_search(d, cfg, plan);
  ASSERT_EQ(g.cv.report.uar, 1.0);
  EXPECT_EQ(g.best.C, 10);
}

TEST(Report, JsonFields) {
  auto r = eval::make_report({0, 1, 2, 1}, {0, 1, 1, 1}, ClassSet::bipolar_default());
  r.params["C"] = "10";
  r.seed = 7;
  r.fold_plan_digest = "00000000deadbeef";
  const auto j = r.to_json();
  for (const char* key : {"\"uar\"", "\"per_class_recall\"", "\"confusion\"", "\"params\"", "\"seed\": 7",
                          "\"fold_plan_digest\": \"00000000deadbeef\""})
    EXPECT_NE(j.find(key), std::string::npos) << key;
  EXPECT_NEAR(r.uar, (1.0 + 1.0 + 0.0) / 3, 1e-15);
}

TEST(Holdout, Plan) {
  const auto p = eval::holdout_plan(6, {4, 1});
  ASSERT_EQ(p.k(), 1u);
  EXPECT_EQ(p.folds[0], (std::vector<int>{1, 4}));
  EXPECT_EQ(p.train_indices(0), (std::vector<int>{0, 2, 3, 5}));
}
