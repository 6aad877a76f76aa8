#include "nirb/kernels.hpp"
#include "nirb/heat.hpp"
#include "nirb/reduced_basis.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace nirb;

namespace {

Trajectory random_trajectory(int size, int steps, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Trajectory t({1.0, steps}, size);
  for (auto& f : t.fields) f = Vector::NullaryExpr(size, [&] { return g(rng); });
  return t;
}

}  // namespace

TEST(ReducedBasis, ModesAreOrthonormalAndH1Orthogonal) { EXPECT_LT(oracles::basis_orthogonality(), 1e-8); }

TEST(ReducedBasis, EigenvaluesAscending) {
  const HeatDiscretization disc(8, HeatSource::manufactured());
  const auto a = solve_fine_pair(disc, 1.0, {1.0, 6});
  const auto b = solve_fine_pair(disc, 3.0, {1.0, 6});
  const ReducedBasis basis = h1_orthogonalize(
      greedy_select({&a.sensitivity, &b.sensitivity}, disc.ops().mass, {0.0, 5}), disc.ops().stiffness);
  ASSERT_EQ(basis.eigenvalues.size(), 5);
  for (int i = 1; i < 5; ++i) EXPECT_LE(basis.eigenvalues[i - 1], basis.eigenvalues[i]);
}

TEST(ReducedBasis, OneTrajectoryOneMode) {
  const Trajectory t = random_trajectory(10, 3, 1);
  const SpMat id = Matrix::Identity(10, 10).sparseView();
  const ReducedBasis b = greedy_select({&t}, id, {0.0, 1});
  EXPECT_EQ(b.size(), 1);
  EXPECT_NEAR(b.modes.col(0).norm(), 1.0, 1e-12);
}

TEST(ReducedBasis, GreedyPicksLargestResidualFirst) {
  Trajectory t({1.0, 2}, 3);
  t.fields[0] = Vector::Unit(3, 0);
  t.fields[1] = 5.0 * Vector::Unit(3, 1);
  t.fields[2] = 2.0 * Vector::Unit(3, 2);
  const SpMat id = Matrix::Identity(3, 3).sparseView();
  const ReducedBasis b = greedy_select({&t}, id, {0.0, 3});
  ASSERT_EQ(b.selection.size(), 3u);
  EXPECT_EQ(b.selection[0].second, 1);
  EXPECT_EQ(b.selection[1].second, 2);
  EXPECT_EQ(b.selection[2].second, 0);
  EXPECT_NEAR(b.greedy_errors[0], 5.0, 1e-12);
}

TEST(ReducedBasis, StopsWhenSpanIsExhausted) {
  Trajectory t({1.0, 3}, 4);
  for (int n = 0; n <= 3; ++n) t.fields[n] = (1.0 + n) * Vector::Unit(4, 0);
  const SpMat id = Matrix::Identity(4, 4).sparseView();
  const ReducedBasis b = greedy_select({&t}, id, {0.0, 3});
  EXPECT_EQ(b.size(), 1);
  EXPECT_TRUE(b.stopped_early);
}

TEST(ReducedBasis, ProjectionRoundTripInSpan) {
  const Trajectory t = random_trajectory(12, 4, 2);
  const SpMat id = Matrix::Identity(12, 12).sparseView();
  const ReducedBasis b = greedy_select({&t}, id, {0.0, 5});
  const Matrix c = project_trajectory(t, b, id);
  const Trajectory r = reconstruct_trajectory(c, b, t.grid);
  for (int n = 0; n < t.levels(); ++n) EXPECT_LT((r.fields[n] - t.fields[n]).norm(), 1e-10);
  EXPECT_LT(true_projection_error(t, b, id, id), 1e-10);
}

TEST(Kernels, ParallelMatchesSerial) {
  std::mt19937 rng(5);
  std::normal_distribution<double> g;
  const Matrix s = Matrix::NullaryExpr(300, 40, [&] { return g(rng); });
  const Vector w = Vector::NullaryExpr(300, [&] { return g(rng); });
  const SpMat gram = (Matrix::Identity(300, 300) * 2.0).sparseView();
  EXPECT_LT((kernels::column_dots(s, w) - kernels::serial::column_dots(s, w)).norm(), 1e-10);
  EXPECT_LT((kernels::column_energies(s, gram) - kernels::serial::column_energies(s, gram)).norm(), 1e-9);
  std::vector<Vector> fields(7, w);
  for (int i = 0; i < 7; ++i) fields[i] = s.col(i);
  const Matrix modes = s.leftCols(5);
  EXPECT_LT((kernels::project_fields(fields, modes, gram) - kernels::serial::project_fields(fields, modes, gram)).norm(),
            1e-9);
  const Matrix coef = Matrix::NullaryExpr(7, 5, [&] { return g(rng); });
  const auto a = kernels::reconstruct_fields(coef, modes);
  const auto b = kernels::serial::reconstruct_fields(coef, modes);
  for (int i = 0; i < 7; ++i) EXPECT_LT((a[i] - b[i]).norm(), 1e-10);
  Matrix x = s, y = s;
  const Vector coeffs = Vector::NullaryExpr(40, [&] { return g(rng); });
  kernels::subtract_rank_one(x, w, coeffs);
  kernels::serial::subtract_rank_one(y, w, coeffs);
  EXPECT_LT((x - y).norm(), 1e-10);
  EXPECT_GE(kernels::thread_count(), 1);
}
