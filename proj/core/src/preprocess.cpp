#include "bdfusion/preprocess.hpp"

#include <cmath>
#include <string>

namespace bdfusion::preprocess {

ZStats fit_z(const FeatureMatrix& train) {
  const auto n = train.rows();
  if (n < 2) throw Error("z-normalization needs at least 2 training rows, got " + std::to_string(n));
  ZStats s;
  s.fitted_on = static_cast<std::size_t>(n);
  s.means = train.values.colwise().mean().transpose();
  s.stds.resize(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double var = (train.values.col(j).array() - s.means(j)).square().sum() / static_cast<double>(n);
    s.stds(j) = std::sqrt(var);
  }
  return s;
}

FeatureMatrix apply_z(const FeatureMatrix& m, const ZStats& s) {
  if (m.cols() != s.means.size()) {
    throw DimensionError("z-normalization expects " + std::to_string(s.means.size()) + " columns, got " +
                         std::to_string(m.cols()));
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (s.stds(j) > 0.0) {
      out.col(j) = (m.values.col(j).array() - s.means(j)) / s.stds(j);
    } else {
      out.col(j).setZero();
    }
  }
  return m.with_values(std::move(out));
}

FeatureMatrix l2_rows(const FeatureMatrix& m) {
  Matrix out = m.values;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return m.with_values(std::move(out));
}

PcaModel fit_pca(const FeatureMatrix& train, double variance_fraction) {
  if (!(variance_fraction > 0.0 && variance_fraction <= 1.0)) {
    throw Error("PCA variance fraction must lie in (0, 1]");
  }
  const auto n = train.rows();
  if (n < 2) throw Error("PCA needs at least 2 training rows");

  PcaModel p;
  p.column_means = train.values.colwise().mean().transpose();
  Matrix centered = train.values.rowwise() - p.column_means.transpose();

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) throw Error("PCA input has rank 0 (all rows identical)");
  const double cutoff = 1e-10 * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;

  Vector energy = sv.head(rank).array().square();
  const double total = energy.sum();
  Eigen::Index m = 0;
  double cumulative = 0.0;
  while (m < rank) {
    cumulative += energy(m) / total;
    ++m;
    if (cumulative >= variance_fraction - 1e-12) break;
  }

  p.components = svd.matrixV().leftCols(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < p.components.rows(); ++r) {
      if (std::abs(p.components(r, c)) > std::abs(p.components(arg, c))) arg = r;
    }
    if (p.components(arg, c) < 0.0) p.components.col(c) *= -1.0;
  }
  p.explained_variance_fractions = energy.head(m) / total;
  p.variances = energy.head(m) / static_cast<double>(n - 1);
  return p;
}

FeatureMatrix apply_pca(const FeatureMatrix& m, const PcaModel& p) {
  if (m.cols() != p.input_dim()) {
    throw DimensionError("PCA expects " + std::to_string(p.input_dim()) + " columns, got " + std::to_string(m.cols()));
  }
  Matrix projected = (m.values.rowwise() - p.column_means.transpose()) * p.components;
  FeatureMatrix out;
  out.values = std::move(projected);
  out.sample_ids = m.sample_ids;
  for (Eigen::Index c = 0; c < p.output_dim(); ++c) out.feature_names.push_back("pc" + std::to_string(c + 1));
  return out;
}

FeatureMatrix apply_selection(const FeatureMatrix& m, const FeatureSelection& sel) {
  if (m.cols() != sel.importances.size()) {
    throw DimensionError("feature selection expects " + std::to_string(sel.importances.size()) +
                         " columns, got " + std::to_string(m.cols()));
  }
  return m.select_cols(sel.kept_indices);
}

}  // namespace bdfusion::preprocess
