#include <bdfusion/preprocess.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace bdfusion;
using namespace bdfusion::preprocess;

namespace {

FeatureMatrix fm(const Matrix& m) {
  FeatureMatrix f;
  f.values = m;
  for (Eigen::Index j = 0; j < m.cols(); ++j) f.feature_names.push_back("f" + std::to_string(j));
  for (Eigen::Index i = 0; i < m.rows(); ++i) f.sample_ids.push_back("s" + std::to_string(i));
  return f;
}

}  // namespace

TEST(ZScore, HandExample) {
  Matrix m(2, 1);
  m << 0, 2;
  const auto s = fit_z(fm(m));
  EXPECT_DOUBLE_EQ(s.means[0], 1.0);
  EXPECT_DOUBLE_EQ(s.stds[0], 1.0);
  EXPECT_EQ(s.fitted_on, 2u);
  const auto z = apply_z(fm(m), s);
  EXPECT_DOUBLE_EQ(z.values(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z.values(1, 0), 1.0);
}

TEST(ZScore, ConstantColumnsMapToZero) {
  Matrix m(3, 2);
  m << 1, 5, 2, 5, 3, 5;
  const auto s = fit_z(fm(m));
  EXPECT_EQ(s.stds[1], 0.0);
  const auto z = apply_z(fm(m), s);
  EXPECT_TRUE(z.values.col(1).isZero(0.0));
  Matrix same(2, 3);
  same << 1, 2, 3, 1, 2, 3;
  EXPECT_TRUE(fit_z(fm(same)).stds.isZero(0.0));
}

TEST(ZScore, Errors) {
  EXPECT_THROW(fit_z(fm(Matrix::Ones(1, 3))), Error);
  const auto s = fit_z(fm(oracle::gaussian_matrix(5, 3, 1)));
  EXPECT_THROW(apply_z(fm(Matrix::Ones(2, 4)), s), DimensionError);
}

TEST(ZScore, StandardizesFitSet) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix m = oracle::gaussian_matrix(30, 6, seed) * 7.0;
    m.col(2).array() += 100.0;
    const auto z = apply_z(fm(m), fit_z(fm(m))).values;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      const double mean = z.col(j).mean();
      const double sd = std::sqrt((z.col(j).array() - mean).square().mean());
      EXPECT_LT(std::abs(mean), 1e-9);
      EXPECT_NEAR(sd, 1.0, 1e-9);
    }
  }
}

TEST(L2, Rows) {
  Matrix m(2, 2);
  m << 3, 4, 0, 0;
  const auto r = l2_rows(fm(m)).values;
  EXPECT_DOUBLE_EQ(r(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(r(0, 1), 0.8);
  EXPECT_EQ(r(1, 0), 0.0);
  EXPECT_EQ(r(1, 1), 0.0);
}

TEST(L2, UnitNormAndIdempotent) {
  const auto once = l2_rows(fm(oracle::gaussian_matrix(40, 7, 3)));
  const auto twice = l2_rows(once);
  for (Eigen::Index i = 0; i < once.rows(); ++i) EXPECT_NEAR(once.values.row(i).norm(), 1.0, 1e-12);
  EXPECT_LT((once.values - twice.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pca, RankOneLine) {
  Matrix m(5, 2);
  for (int i = 0; i < 5; ++i) m.row(i) << i, 2.0 * i + 1.0;
  const auto p = fit_pca(fm(m), 0.99);
  EXPECT_EQ(p.output_dim(), 1);
  EXPECT_NEAR(p.explained_variance_fractions[0], 1.0, 1e-12);
}

TEST(Pca, RankZeroThrows) { EXPECT_THROW(fit_pca(fm(Matrix::Ones(4, 3)), 0.99), Error); }

TEST(Pca, FullRetentionReconstructs) {
  Matrix m = oracle::gaussian_matrix(8, 12, 4);  // rank 7 after centering
  const auto p = fit_pca(fm(m), 1.0);
  EXPECT_EQ(p.output_dim(), 7);
  const Matrix centered = m.rowwise() - m.colwise().mean();
  const Matrix proj = apply_pca(fm(m), p).values;
  EXPECT_LT((proj * p.components.transpose() - centered).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Pca, MatchesJacobiOracle) {
  const Matrix m = oracle::gaussian_matrix(50, 10, 2024);
  const auto p = fit_pca(fm(m), 1.0);
  ASSERT_EQ(p.output_dim(), 10);
  const auto eig = oracle::jacobi_eigen(oracle::covariance(m));
  const Matrix proj = apply_pca(fm(m), p).values;
  const Matrix centered = m.rowwise() - m.colwise().mean();
  for (int c = 0; c < 10; ++c) {
    const double var = proj.col(c).squaredNorm() / 49.0;
    EXPECT_NEAR(var, eig.values[c], 1e-8);
    EXPECT_NEAR(p.variances[c], eig.values[c], 1e-8);
    // Oracle projection with the same sign convention.
    Vector v(10);
    for (int r = 0; r < 10; ++r) v[r] = eig.vectors[r][c];
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    const Vector oracle_proj = centered * v;
    EXPECT_LT((proj.col(c) - oracle_proj).cwiseAbs().maxCoeff(), 1e-8) << c;
  }
}

TEST(Pca, Invariants) {
  const Matrix m = oracle::gaussian_matrix(40, 9, 77);
  const auto p = fit_pca(fm(m), 1.0);
  EXPECT_LT((p.components.transpose() * p.components - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(p.explained_variance_fractions.sum(), 1.0 + 1e-9);
  for (Eigen::Index c = 0; c < p.output_dim(); ++c) {
    EXPECT_GT(p.explained_variance_fractions[c], 0.0);
    EXPECT_LE(p.explained_variance_fractions[c], 1.0);
    if (c > 0) EXPECT_LE(p.explained_variance_fractions[c], p.explained_variance_fractions[c - 1]);
    Eigen::Index arg;
    p.components.col(c).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(p.components(arg, c), 0.0);
  }
  // Reconstruction error non-increasing in m.
  const Matrix centered = m.rowwise() - m.colwise().mean();
  double prev = 1e300;
  for (int k = 1; k <= 9; ++k) {
    const Matrix w = p.components.leftCols(k);
    const double err = (centered - centered * w * w.transpose()).squaredNorm();
    EXPECT_LE(err, prev + 1e-9);
    prev = err;
  }
}

TEST(Pca, IsometryAndDimensionCheck) {
  const Matrix m = oracle::gaussian_matrix(12, 5, 8);
  const auto p = fit_pca(fm(m), 1.0);
  const Matrix proj = apply_pca(fm(m), p).values;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      EXPECT_NEAR((proj.row(i) - proj.row(j)).norm(), (m.row(i) - m.row(j)).norm(), 1e-8);
  EXPECT_THROW(apply_pca(fm(Matrix::Ones(2, 4)), p), DimensionError);
  EXPECT_EQ(apply_pca(fm(m), p).feature_names.front(), "pc1");
}

TEST(Pca, VarianceFractionPicksSmallestM) {
  Matrix m = oracle::gaussian_matrix(60, 4, 5);
  m.col(0) *= 10.0;
  m.col(1) *= 0.01;
  m.col(2) *= 0.01;
  m.col(3) *= 0.01;
  EXPECT_EQ(fit_pca(fm(m), 0.99).output_dim(), 1);
  EXPECT_EQ(fit_pca(fm(m), 1.0).output_dim(), 4);
}

TEST(Trees, PerfectPredictorIsMostImportant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix m = oracle::gaussian_matrix(90, 10, 1000 + seed);
    std::vector<int> labels(90);
    for (int i = 0; i < 90; ++i) labels[i] = i % 3;
    const int signal = static_cast<int>(seed % 10);
    for (int i = 0; i < 90; ++i) m(i, signal) = labels[i];
    const auto sel = tree_feature_select(fm(m), labels, {100, 0, 1, seed});
    Eigen::Index best;
    sel.importances.maxCoeff(&best);
    EXPECT_EQ(best, signal) << "seed " << seed;
  }
}

TEST(Trees, ConstantFeatureExcluded) {
  Matrix m = oracle::gaussian_matrix(40, 5, 3);
  m.col(3).setConstant(2.5);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) labels[i] = m(i, 0) > 0 ? 1 : 0;
  const auto sel = tree_feature_select(fm(m), labels, {50, 0, 1, 9});
  EXPECT_EQ(sel.importances[3], 0.0);
  EXPECT_EQ(std::count(sel.kept_indices.begin(), sel.kept_indices.end(), 3), 0);
  EXPECT_NEAR(sel.importances.sum(), 1.0, 1e-9);
  EXPECT_TRUE((sel.importances.array() >= 0).all());
  EXPECT_TRUE(std::is_sorted(sel.kept_indices.begin(), sel.kept_indices.end()));
  EXPECT_FALSE(sel.kept_indices.empty());
  const auto reduced = apply_selection(fm(m), sel);
  EXPECT_EQ(reduced.cols(), static_cast<Eigen::Index>(sel.kept_indices.size()));
}

TEST(Trees, DeterministicPerSeed) {
  const Matrix m = oracle::gaussian_matrix(50, 8, 12);
  std::vector<int> labels(50);
  for (int i = 0; i < 50; ++i) labels[i] = (m(i, 1) + m(i, 4) > 0) ? 1 : 0;
  const auto a = tree_feature_select(fm(m), labels, {30, 0, 1, 5});
  const auto b = tree_feature_select(fm(m), labels, {30, 0, 1, 5});
  EXPECT_EQ(a.importances, b.importances);
  EXPECT_EQ(a.kept_indices, b.kept_indices);
}

TEST(Trees, Errors) {
  const Matrix m = oracle::gaussian_matrix(10, 3, 1);
  EXPECT_THROW(tree_feature_select(fm(m), std::vector<int>(10, 0), {}), Error);
  EXPECT_THROW(tree_feature_select(fm(m), std::vector<int>(9, 0), {}), Error);
  std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  EXPECT_THROW(tree_feature_select(fm(m), labels, {0, 0, 1, 1}), Error);
}
