#include "bdfusion/eval.hpp"

#include "bdfusion/kelm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

namespace bdfusion::eval {

std::vector<int> FoldPlan::train_indices(std::size_t i) const {
  std::vector<char> held(n_samples, 0);
  for (int s : folds.at(i)) held[static_cast<std::size_t>(s)] = 1;
  std::vector<int> out;
  out.reserve(n_samples - folds[i].size());
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (!held[s]) out.push_back(static_cast<int>(s));
  }
  return out;
}

std::string FoldPlan::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(n_samples);
  for (const auto& f : folds) {
    mix(f.size());
    for (int s : f) mix(static_cast<std::uint64_t>(s));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FoldPlan make_folds(const std::vector<int>& labels, int k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw Error("fold count must be at least 2");
  const auto n = labels.size();
  if (static_cast<std::size_t>(k) > n) {
    throw Error("fold count " + std::to_string(k) + " exceeds sample count " + std::to_string(n));
  }
  FoldPlan plan;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.n_samples = n;
  plan.folds.resize(static_cast<std::size_t>(k));

  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  auto deal = [&](std::vector<int>& members) {
    std::shuffle(members.begin(), members.end(), rng);
    for (int s : members) {
      plan.folds[next].push_back(s);
      next = (next + 1) % plan.folds.size();
    }
  };

  if (stratified) {
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<int>(i));
    for (auto& [cls, members] : by_class) {
      if (members.size() < static_cast<std::size_t>(k)) {
        throw Error("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                    " samples, fewer than " + std::to_string(k) + " folds");
      }
    }
    for (auto& [cls, members] : by_class) deal(members);
  } else {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    deal(all);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

FoldPlan holdout_plan(std::size_t n_samples, const std::vector<int>& dev_idx) {
  if (dev_idx.empty()) throw Error("development split is empty");
  if (dev_idx.size() >= n_samples) throw Error("development split leaves no training rows");
  FoldPlan plan;
  plan.n_samples = n_samples;
  plan.folds.push_back(dev_idx);
  std::sort(plan.folds[0].begin(), plan.folds[0].end());
  for (int s : plan.folds[0]) {
    if (s < 0 || static_cast<std::size_t>(s) >= n_samples) throw Error("development index out of range");
  }
  return plan;
}

EvalReport make_report(const std::vector<int>& truth, const std::vector<int>& predicted, const ClassSet& classes) {
  EvalReport r;
  r.confusion = metrics::confusion(truth, predicted, static_cast<int>(classes.size()));
  r.per_class_recall = metrics::per_class_recall(r.confusion);
  r.uar = metrics::uar(r.confusion);
  r.class_names = classes.names();
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["uar"] = uar;
  j["per_class_recall"] = per_class_recall;
  std::vector<std::vector<int>> rows;
  for (int i = 0; i < confusion.counts.rows(); ++i) {
    std::vector<int> row;
    for (int c = 0; c < confusion.counts.cols(); ++c) row.push_back(confusion.counts(i, c));
    rows.push_back(std::move(row));
  }
  j["confusion"] = rows;
  j["classes"] = class_names;
  j["params"] = params;
  j["seed"] = seed;
  j["fold_plan_digest"] = fold_plan_digest;
  if (!extras.empty()) j["metrics"] = extras;
  if (!config.empty()) j["config"] = config;
  return j.dump(2) + "\n";
}

namespace {

std::vector<int> gather(const std::vector<int>& v, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> covered_rows(const FoldPlan& plan) {
  std::vector<int> out;
  for (const auto& f : plan.folds) out.insert(out.end(), f.begin(), f.end());
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw Error("fold plan has overlapping folds");
  return out;
}

CvResult finish(const Dataset& data, const FoldPlan& plan, const std::vector<int>& covered, const ProbMatrix& compact) {
  CvResult r;
  r.covered = covered;
  r.pooled_probs = ProbMatrix::Zero(static_cast<Eigen::Index>(data.size()), compact.cols());
  for (std::size_t i = 0; i < covered.size(); ++i) {
    r.pooled_probs.row(covered[i]) = compact.row(static_cast<Eigen::Index>(i));
  }
  r.report = make_report(gather(data.labels, covered), argmax_rows(compact), data.classes);
  r.report.seed = plan.seed;
  r.report.fold_plan_digest = plan.digest();
  return r;
}

}  // namespace

CvResult cross_validate(const Dataset& data, const FoldModel& model, const FoldPlan& plan) {
  if (plan.n_samples != data.size()) throw DimensionError("fold plan does not match dataset size");
  const auto covered = covered_rows(plan);
  std::vector<Eigen::Index> position(data.size(), -1);
  for (std::size_t i = 0; i < covered.size(); ++i) position[static_cast<std::size_t>(covered[i])] = static_cast<Eigen::Index>(i);

  const auto t = static_cast<Eigen::Index>(data.classes.size());
  ProbMatrix compact = ProbMatrix::Zero(static_cast<Eigen::Index>(covered.size()), t);
  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto train = data.subset(plan.train_indices(f));
    const auto held = data.subset(plan.folds[f]);
    const ProbMatrix p = model(train, held);
    if (p.rows() != static_cast<Eigen::Index>(held.size()) || p.cols() != t) {
      throw DimensionError("fold model returned a " + std::to_string(p.rows()) + "x" + std::to_string(p.cols()) +
                           " probability matrix");
    }
    for (std::size_t i = 0; i < plan.folds[f].size(); ++i) {
      compact.row(position[static_cast<std::size_t>(plan.folds[f][i])]) = p.row(static_cast<Eigen::Index>(i));
    }
  }
  return finish(data, plan, covered, compact);
}

CvResult cross_validate(const Dataset& data, const pipeline::PipelineConfig& cfg,
                        const pipeline::KernelParams& params, const FoldPlan& plan) {
  auto model = [&](const Dataset& train, const Dataset& held) {
    return pipeline::predict_probs(pipeline::fit(train, cfg, params), held.features);
  };
  auto r = cross_validate(data, model, plan);
  r.report.params = params.describe(cfg.model);
  return r;
}

GridResult grid_search(const Dataset& data, const pipeline::PipelineConfig& cfg, const FoldPlan& plan) {
  using pipeline::ModelKind;
  cfg.validate();
  if (plan.n_samples != data.size()) throw DimensionError("fold plan does not match dataset size");

  std::vector<double> c_grid = cfg.C_grid;
  std::sort(c_grid.begin(), c_grid.end());
  c_grid.erase(std::unique(c_grid.begin(), c_grid.end()), c_grid.end());
  std::vector<pipeline::GammaChoice> g_grid = cfg.gamma_grid;
  std::sort(g_grid.begin(), g_grid.end());
  g_grid.erase(std::unique(g_grid.begin(), g_grid.end()), g_grid.end());
  std::vector<double> a_grid = cfg.alpha_grid;
  std::sort(a_grid.begin(), a_grid.end());
  a_grid.erase(std::unique(a_grid.begin(), a_grid.end()), a_grid.end());

  const auto covered = covered_rows(plan);
  std::vector<Eigen::Index> position(data.size(), -1);
  for (std::size_t i = 0; i < covered.size(); ++i) position[static_cast<std::size_t>(covered[i])] = static_cast<Eigen::Index>(i);
  const auto truth = gather(data.labels, covered);
  const int t = static_cast<int>(data.classes.size());
  const auto n_cov = static_cast<Eigen::Index>(covered.size());

  struct FoldData {
    Matrix train, held;
    std::vector<int> train_labels;
    Matrix targets;
    Vector weights;
  };
  std::vector<FoldData> folds;
  for (std::size_t f = 0; f < plan.k(); ++f) {
    const auto train = data.subset(plan.train_indices(f));
    const auto held = data.subset(plan.folds[f]);
    const auto prep = pipeline::Preprocessor::fit(train, cfg);
    FoldData fd;
    fd.train = prep.apply(train.features).values;
    fd.held = prep.apply(held.features).values;
    fd.train_labels = train.labels;
    fd.targets = kelm::make_targets(train.labels, t);
    fd.weights = kelm::class_weights(train.labels, t);
    folds.push_back(std::move(fd));
  }

  const bool need_unweighted = cfg.model != ModelKind::wkelm;
  const bool need_weighted = cfg.model != ModelKind::kelm;
  // pooled[weighted][c][g]; empty matrix marks a failed solve.
  std::vector<std::vector<std::vector<ProbMatrix>>> pooled(
      2, std::vector<std::vector<ProbMatrix>>(c_grid.size(), std::vector<ProbMatrix>(g_grid.size())));

  for (std::size_t gi = 0; gi < g_grid.size(); ++gi) {
    std::vector<Matrix> k_train, k_held;
    for (const auto& fd : folds) {
      const double gamma = g_grid[gi].resolve(fd.train);
      k_train.push_back(kelm::rbf_kernel(fd.train, fd.train, gamma));
      k_held.push_back(kelm::rbf_kernel(fd.held, fd.train, gamma));
    }
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
      for (int w = 0; w < 2; ++w) {
        if ((w == 0 && !need_unweighted) || (w == 1 && !need_weighted)) continue;
        ProbMatrix compact(n_cov, t);
        bool ok = true;
        for (std::size_t f = 0; f < folds.size() && ok; ++f) {
          try {
            const Matrix beta = kelm::solve_beta(k_train[f], folds[f].targets, c_grid[ci],
                                                 w == 1 ? folds[f].weights : Vector());
            const ProbMatrix p = kelm::scores_to_probs(k_held[f] * beta);
            for (std::size_t i = 0; i < plan.folds[f].size(); ++i) {
              compact.row(position[static_cast<std::size_t>(plan.folds[f][i])]) = p.row(static_cast<Eigen::Index>(i));
            }
          } catch (const SolveError&) {
            ok = false;
          }
        }
        if (ok) pooled[static_cast<std::size_t>(w)][ci][gi] = std::move(compact);
      }
    }
  }

  GridResult result;
  double best_uar = -1.0;
  ProbMatrix best_probs;
  auto consider = [&](const ProbMatrix& p, const pipeline::KernelParams& params) {
    ++result.candidates_evaluated;
    const double u = metrics::uar(metrics::confusion(truth, argmax_rows(p), t));
    if (u > best_uar) {
      best_uar = u;
      best_probs = p;
      result.best = params;
    }
  };

  for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
    if (cfg.model == ModelKind::fused) {
      for (std::size_t cw = 0; cw < c_grid.size(); ++cw) {
        for (std::size_t gi = 0; gi < g_grid.size(); ++gi) {
          const auto& pu = pooled[0][ci][gi];
          const auto& pw = pooled[1][cw][gi];
          if (pu.size() == 0 || pw.size() == 0) {
            result.candidates_failed += a_grid.size();
            continue;
          }
          for (double a : a_grid) {
            consider(kelm::blend(pu, pw, a), pipeline::KernelParams{c_grid[ci], c_grid[cw], g_grid[gi], a});
          }
        }
      }
    } else {
      const std::size_t w = cfg.model == ModelKind::wkelm ? 1 : 0;
      for (std::size_t gi = 0; gi < g_grid.size(); ++gi) {
        const auto& p = pooled[w][ci][gi];
        if (p.size() == 0) {
          ++result.candidates_failed;
          continue;
        }
        consider(p, pipeline::KernelParams{c_grid[ci], c_grid[ci], g_grid[gi], 1.0});
      }
    }
  }
  if (best_uar < 0.0) throw SolveError("every grid candidate failed to solve");

  result.cv = finish(data, plan, covered, best_probs);
  result.cv.report.params = result.best.describe(cfg.model);
  return result;
}

}  // namespace bdfusion::eval
