#include "nirb/rectification.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nirb;

TEST(Rectification, IdenticalTablesGiveIdentity) { EXPECT_LT(oracles::rectification_identity(), 1e-8); }

TEST(Rectification, LargeDeltaTendsToScaledCrossProduct) {
  EXPECT_LT(oracles::rectification_tikhonov_limit(), 1e-6);
}

TEST(Rectification, RecoversALinearMap) {
  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  const Matrix a = Matrix::NullaryExpr(10, 4, [&] { return g(rng); });
  const Matrix r = Matrix::NullaryExpr(4, 4, [&] { return g(rng); });
  const Matrix b = a * r.transpose();
  const RectificationSet set = build_rectification({a}, {b}, 1e-14);
  EXPECT_LT((set.matrices[0] - r).norm(), 1e-8);
  const Vector x = Vector::NullaryExpr(4, [&] { return g(rng); });
  EXPECT_LT((set.apply(0, x) - r * x).norm(), 1e-8);
}

TEST(Rectification, OneByOnePerLevel) {
  Matrix a(1, 1), b(1, 1);
  a << 2.0;
  b << 3.0;
  const RectificationSet set = build_rectification({a, a}, {b, 2 * b}, 0.0);
  ASSERT_EQ(set.steps(), 2);
  EXPECT_NEAR(set.matrices[0](0, 0), 1.5, 1e-14);
  EXPECT_NEAR(set.matrices[1](0, 0), 3.0, 1e-14);
  Matrix coarse(2, 1);
  coarse << 1.0, 1.0;
  const Matrix out = set.apply_all(coarse);
  EXPECT_NEAR(out(0, 0), 1.5, 1e-14);
  EXPECT_NEAR(out(1, 0), 3.0, 1e-14);
}

TEST(Rectification, PerLevelSplitsTables) {
  Matrix t1(3, 2), t2(3, 2);
  t1 << 1, 2, 3, 4, 5, 6;
  t2 << 7, 8, 9, 10, 11, 12;
  const auto levels = per_level({t1, t2});
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[1](0, 0), 3);
  EXPECT_EQ(levels[1](1, 1), 10);
}

TEST(Rectification, MismatchedStacksRejected) {
  EXPECT_THROW(build_rectification({Matrix::Ones(2, 2)}, {Matrix::Ones(2, 2), Matrix::Ones(2, 2)}, 0.0),
               InvalidArgument);
}
