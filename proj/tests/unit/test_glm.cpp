#include <gtest/gtest.h>

#include <svylasso/debiased.hpp>
#include <svylasso/errors.hpp>
#include <svylasso/glm.hpp>

#include "fixtures.hpp"

using namespace svylasso;
using fixtures::logit_sample;

TEST(Glm, LoglikAtZeroIsMinusLog2) {
  const Dataset ds = logit_sample(40, Eigen::Vector3d(0.2, 1.0, -1.0), 3, false, true);
  EXPECT_NEAR(weighted_loglik(ds, logit(), Eigen::VectorXd::Zero(3)), -std::log(2.0), 1e-14);
}

TEST(Glm, SinglePointLoglik) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(1, 1);
  const Dataset ds = make_dataset(Eigen::VectorXd::Ones(1), x, Eigen::VectorXd::Constant(1, 2.0));
  EXPECT_NEAR(weighted_loglik(ds, logit(), Eigen::VectorXd::Zero(1)), -2.0 * std::log(2.0), 1e-14);
}

TEST(Glm, LoglikMatchesLoopOracle) {
  const Dataset ds = logit_sample(5, Eigen::Vector3d(0.3, -0.5, 0.8), 11);
  const Eigen::Vector3d th(0.1, 0.7, -0.4);
  EXPECT_NEAR(weighted_loglik(ds, logit(), th), fixtures::loglik_oracle(ds, th), 1e-12);
}

TEST(Glm, CurvatureMatchesLoopOracles) {
  const Dataset ds = logit_sample(30, Eigen::Vector4d(0.3, -0.5, 0.8, 0.0), 12);
  const Eigen::Vector4d th(0.1, 0.7, -0.4, 0.2);
  const CurvatureSet cs = curvature(ds, logit(), th);
  EXPECT_LT((cs.score - fixtures::score_oracle(ds, th)).norm(), 1e-12);
  EXPECT_LT((cs.hessian - fixtures::hessian_oracle(ds, th)).norm(), 1e-12);
  EXPECT_LT((cs.information - fixtures::information_oracle(ds, th)).norm(), 1e-12);
}

TEST(Glm, ScoreAtZero) {
  const Dataset ds = logit_sample(25, Eigen::Vector3d(0.3, -0.5, 0.8), 13);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(3);
  for (Index i = 0; i < ds.n(); ++i) expect += ds.w[i] * ds.X.row(i).transpose() * (ds.y[i] - 0.5);
  expect /= static_cast<double>(ds.n());
  EXPECT_LT((score(ds, logit(), Eigen::VectorXd::Zero(3)) - expect).norm(), 1e-14);
}

TEST(Glm, FiniteDifferenceScoreAndHessian) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = logit_sample(60, Eigen::Vector4d(0.2, 0.6, -0.6, 0.3), 100 + seed);
    svylasso::Rng rng(seed);
    Eigen::VectorXd th(4);
    for (Index j = 0; j < 4; ++j) th[j] = fixtures::standard_normal(rng) * 0.5;
    auto ll = [&](const Eigen::VectorXd& t) { return Eigen::VectorXd::Constant(1, weighted_loglik(ds, logit(), t)); };
    auto sc = [&](const Eigen::VectorXd& t) { return score(ds, logit(), t); };
    const Eigen::VectorXd fd_score = fixtures::fd_jacobian(ll, th).transpose();
    const Eigen::MatrixXd fd_hess = -fixtures::fd_jacobian(sc, th);
    EXPECT_LT(fixtures::rel_err(score(ds, logit(), th), fd_score), 1e-6) << seed;
    EXPECT_LT(fixtures::rel_err(hessian(ds, logit(), th), fd_hess), 1e-6) << seed;
  }
}

TEST(Glm, ScoreVanishesAtMle) {
  const Dataset ds = logit_sample(200, Eigen::Vector3d(0.2, 0.5, -0.5), 14, false, true);
  const MleFit mle = fit_mle(ds, logit());
  ASSERT_TRUE(mle.converged);
  EXPECT_LT(score(ds, logit(), mle.theta).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(Glm, SymmetryAndPsd) {
  const Dataset ds = logit_sample(50, Eigen::Vector4d(0.2, 0.6, -0.6, 0.3), 15);
  const CurvatureSet cs = curvature(ds, logit(), Eigen::Vector4d(0.1, 0.2, 0.3, 0.4));
  EXPECT_LT((cs.hessian - cs.hessian.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((cs.information - cs.information.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  svylasso::Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd v(4);
    for (Index j = 0; j < 4; ++j) v[j] = fixtures::standard_normal(rng);
    EXPECT_GE(v.dot(cs.information * v), 0.0);
  }
}

TEST(Glm, WeightScaling) {
  const Dataset ds = logit_sample(30, Eigen::Vector3d(0.2, 0.6, -0.6), 16);
  Dataset scaled = ds;
  scaled.w *= 4.0;
  const Eigen::Vector3d th(0.3, -0.2, 0.5);
  const CurvatureSet a = curvature(ds, logit(), th);
  const CurvatureSet b = curvature(scaled, logit(), th);
  EXPECT_NEAR(weighted_loglik(scaled, logit(), th), 4.0 * weighted_loglik(ds, logit(), th), 1e-13);
  EXPECT_LT((b.score - 4.0 * a.score).norm(), 1e-13);
  EXPECT_LT((b.hessian - 4.0 * a.hessian).norm(), 1e-13);
  EXPECT_LT((b.information - 16.0 * a.information).norm(), 1e-12);
}

TEST(Glm, LogitTermBounds) {
  const LogitFamily f;
  for (double t : {-800.0, -30.0, -1.0, 0.0, 2.0, 40.0, 800.0}) {
    for (double y : {0.0, 1.0}) {
      EXPECT_GE(f.loss(y, t), 0.0);
      EXPECT_TRUE(std::isfinite(f.loss(y, t)));
      EXPECT_GE(f.d2(y, t), 0.0);
      EXPECT_LE(f.d2(y, t), 0.25);
    }
  }
  EXPECT_EQ(logistic(800.0), 1.0);
  EXPECT_EQ(logistic(-800.0), 0.0);
  EXPECT_NEAR(log1p_exp(800.0), 800.0, 1e-12);
}

TEST(Glm, DimensionMismatchThrows) {
  const Dataset ds = logit_sample(10, Eigen::Vector3d(0.2, 0.6, -0.6), 17);
  EXPECT_THROW(weighted_loglik(ds, logit(), Eigen::VectorXd::Zero(2)), ArgumentError);
  EXPECT_THROW(curvature(ds, logit(), Eigen::VectorXd::Zero(4)), ArgumentError);
}

TEST(Partition, FullAndInterceptOnly) {
  const Dataset ds = logit_sample(30, Eigen::Vector4d(0.2, 0.6, -0.6, 0.3), 18);
  const CurvatureSet cs = curvature(ds, logit(), Eigen::Vector4d(0.1, 0.2, 0.3, 0.4));
  const ModelPartition full = partition(cs, {0, 1, 2, 3});
  EXPECT_EQ(full.size_n(), 0);
  EXPECT_LT((full.h_mm - cs.hessian).norm(), 1e-15);
  const ModelPartition icpt = partition(cs, {0});
  ASSERT_EQ(icpt.h_mm.rows(), 1);
  EXPECT_EQ(icpt.h_mm(0, 0), cs.hessian(0, 0));
  EXPECT_THROW(partition(cs, {1, 2}), ArgumentError);
  EXPECT_THROW(partition(cs, {0, 0, 1}), ArgumentError);
  EXPECT_THROW(partition(cs, {0, 4}), ArgumentError);
}

TEST(Partition, BlocksMatchCopyOracle) {
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(7);
  t0 << 0.1, 0.5, -0.5, 0.3, 0.0, 0.2, -0.1;
  const Dataset ds = logit_sample(80, t0, 19);
  const CurvatureSet cs = curvature(ds, logit(), t0);
  const IndexSet m{0, 2, 5};
  const IndexSet nm{1, 3, 4, 6};
  const ModelPartition part = partition(cs, m);
  EXPECT_EQ(part.inactive, nm);
  for (std::size_t a = 0; a < m.size(); ++a) {
    EXPECT_EQ(part.score_m[a], cs.score[m[a]]);
    for (std::size_t b = 0; b < m.size(); ++b) EXPECT_EQ(part.h_mm(a, b), cs.hessian(m[a], m[b]));
    for (std::size_t b = 0; b < nm.size(); ++b) {
      EXPECT_EQ(part.h_mn(a, b), cs.hessian(m[a], nm[b]));
      EXPECT_EQ(part.i_mn(a, b), cs.information(m[a], nm[b]));
    }
  }
  for (std::size_t a = 0; a < nm.size(); ++a) {
    EXPECT_EQ(part.score_n[a], cs.score[nm[a]]);
    for (std::size_t b = 0; b < nm.size(); ++b) {
      EXPECT_EQ(part.h_nn(a, b), cs.hessian(nm[a], nm[b]));
      EXPECT_EQ(part.i_nn(a, b), cs.information(nm[a], nm[b]));
    }
    for (std::size_t b = 0; b < m.size(); ++b) EXPECT_EQ(part.h_nm(a, b), cs.hessian(nm[a], m[b]));
  }
}
