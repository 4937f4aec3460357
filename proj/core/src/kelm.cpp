#include "bdfusion/kelm.hpp"

#include "bdfusion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bdfusion::kelm {

Matrix rbf_kernel(const Matrix& x, const Matrix& y, double gamma) {
  if (x.cols() != y.cols()) {
    throw DimensionError("kernel inputs have " + std::to_string(x.cols()) + " and " + std::to_string(y.cols()) +
                         " columns");
  }
  if (!(gamma > 0.0)) throw Error("kernel gamma must be positive");
  const Vector xn = x.rowwise().squaredNorm();
  const Vector yn = y.rowwise().squaredNorm();
  Matrix d2 = -2.0 * (x * y.transpose());
  d2.colwise() += xn;
  d2.rowwise() += yn.transpose();
  return (-gamma * d2.array().max(0.0)).exp().matrix();
}

double median_heuristic_gamma(const Matrix& x) {
  std::vector<double> d2;
  const auto n = x.rows();
  d2.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).squaredNorm();
      if (v > 0.0) d2.push_back(v);
    }
  }
  if (d2.empty()) return 1.0;
  const auto mid = d2.begin() + static_cast<std::ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double med = *mid;
  if (d2.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(d2.begin(), mid));
  }
  return 1.0 / med;
}

Matrix make_targets(const std::vector<int>& labels, int n_classes) {
  Matrix t = Matrix::Constant(static_cast<Eigen::Index>(labels.size()), n_classes, -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) throw Error("label " + std::to_string(labels[i]) + " out of range");
    t(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return t;
}

const char* to_string(Weighting w) {
  return w == Weighting::unweighted ? "unweighted" : "class_weighted";
}

Weighting weighting_from_string(const std::string& s) {
  if (s == "unweighted") return Weighting::unweighted;
  if (s == "class_weighted") return Weighting::class_weighted;
  throw Error("unknown weighting '" + s + "'");
}

Vector class_weights(const std::vector<int>& labels, int n_classes) {
  std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw Error("label " + std::to_string(y) + " out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  Vector w(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = 1.0 / counts[static_cast<std::size_t>(labels[i])];
  }
  return w;
}

Matrix solve_beta(const Matrix& kernel, const Matrix& targets, double C, const Vector& sample_weights) {
  if (!(C > 0.0)) throw Error("regularization C must be positive");
  const auto n = kernel.rows();
  if (kernel.cols() != n || targets.rows() != n) throw DimensionError("kernel and targets disagree on sample count");
  Matrix a = kernel;
  if (sample_weights.size() == 0) {
    a.diagonal().array() += 1.0 / C;
  } else {
    if (sample_weights.size() != n) throw DimensionError("sample weight count does not match kernel");
    if ((sample_weights.array() <= 0.0).any()) throw Error("sample weights must be positive");
    a.diagonal().array() += sample_weights.array().inverse() / C;
  }
  Eigen::LLT<Matrix> llt(a);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (!(rcond >= 1e-14)) {
    std::ostringstream os;
    os << "kernel system is singular to working precision (rcond " << rcond << ", C " << C << ", N " << n << ")";
    throw SolveError(os.str());
  }
  return llt.solve(targets);
}

KelmModel train_kelm_weighted(const Matrix& train, const std::vector<int>& labels, int n_classes, double C,
                              double gamma, const Vector& sample_weights) {
  if (train.rows() < 1) throw Error("kernel ELM needs at least one training sample");
  if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
    throw DimensionError("label count does not match training rows");
  }
  KelmModel m;
  m.train_matrix = train;
  m.gamma = gamma;
  m.C = C;
  m.n_classes = n_classes;
  m.weighting = Weighting::class_weighted;
  const Matrix k = rbf_kernel(train, train, gamma);
  m.beta = solve_beta(k, make_targets(labels, n_classes), C, sample_weights);
  return m;
}

KelmModel train_kelm(const Matrix& train, const std::vector<int>& labels, int n_classes, double C, double gamma,
                     Weighting weighting) {
  if (weighting == Weighting::class_weighted) {
    return train_kelm_weighted(train, labels, n_classes, C, gamma, class_weights(labels, n_classes));
  }
  if (train.rows() < 1) throw Error("kernel ELM needs at least one training sample");
  if (static_cast<Eigen::Index>(labels.size()) != train.rows()) {
    throw DimensionError("label count does not match training rows");
  }
  KelmModel m;
  m.train_matrix = train;
  m.gamma = gamma;
  m.C = C;
  m.n_classes = n_classes;
  m.weighting = Weighting::unweighted;
  m.beta = solve_beta(rbf_kernel(train, train, gamma), make_targets(labels, n_classes), C, Vector());
  return m;
}

Matrix predict_scores(const KelmModel& m, const Matrix& x) {
  if (x.cols() != m.train_matrix.cols()) {
    throw DimensionError("model expects " + std::to_string(m.train_matrix.cols()) + " features, got " +
                         std::to_string(x.cols()));
  }
  return rbf_kernel(x, m.train_matrix, m.gamma) * m.beta;
}

ProbMatrix scores_to_probs(const Matrix& scores) {
  ProbMatrix p(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    p.row(i) = (scores.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

ProbMatrix predict_probs(const KelmModel& m, const Matrix& x) {
  return scores_to_probs(predict_scores(m, x));
}

ProbMatrix blend(const ProbMatrix& p_unweighted, const ProbMatrix& p_weighted, double alpha) {
  if (p_unweighted.rows() != p_weighted.rows() || p_unweighted.cols() != p_weighted.cols()) {
    throw DimensionError("blended probability matrices differ in shape");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("blend coefficient must lie in [0, 1]");
  if (alpha == 1.0) return p_unweighted;
  if (alpha == 0.0) return p_weighted;
  return alpha * p_unweighted + (1.0 - alpha) * p_weighted;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 20.0);
  return grid;
}

std::size_t select_alpha(const ProbMatrix& p_unweighted, const ProbMatrix& p_weighted,
                         const std::vector<int>& labels, int n_classes, const std::vector<double>& grid) {
  if (grid.empty()) throw Error("alpha grid must not be empty");
  // Smallest alpha wins ties regardless of grid order.
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  std::size_t best = order.front();
  double best_uar = -1.0;
  for (std::size_t i : order) {
    const auto pred = argmax_rows(blend(p_unweighted, p_weighted, grid[i]));
    const double u = metrics::uar(metrics::confusion(labels, pred, n_classes));
    if (u > best_uar) {
      best_uar = u;
      best = i;
    }
  }
  return best;
}

FusedElm train_fused_elm(const Matrix& train, const std::vector<int>& labels, const Matrix& dev,
                         const std::vector<int>& dev_labels, int n_classes, double C_unweighted,
                         double C_weighted, double gamma, const std::vector<double>& alpha_grid) {
  if (alpha_grid.empty()) throw Error("alpha grid must not be empty");
  FusedElm f;
  f.unweighted = train_kelm(train, labels, n_classes, C_unweighted, gamma, Weighting::unweighted);
  f.weighted = train_kelm(train, labels, n_classes, C_weighted, gamma, Weighting::class_weighted);
  const auto pu = predict_probs(f.unweighted, dev);
  const auto pw = predict_probs(f.weighted, dev);
  f.alpha = alpha_grid[select_alpha(pu, pw, dev_labels, n_classes, alpha_grid)];
  return f;
}

ProbMatrix predict_probs(const FusedElm& m, const Matrix& x) {
  return blend(predict_probs(m.unweighted, x), predict_probs(m.weighted, x), m.alpha);
}

}  // namespace bdfusion::kelm
