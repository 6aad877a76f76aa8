#include "nirb/adjoint.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nirb;

TEST(Adjoint, GradientMatchesFiniteDifferences) { EXPECT_LT(oracles::heat_gradient_fd(), 0.02); }

TEST(Adjoint, ExactMeasurementsGiveZeroAdjointAndGradient) {
  const HeatDiscretization disc(6, HeatSource::manufactured());
  const TimeGrid grid{1.0, 6};
  const Trajectory u = solve_state_fine(disc, 1.5, grid);
  const Trajectory chi = solve_adjoint_fine(disc, 1.5, u, u);
  for (const auto& f : chi.fields) EXPECT_EQ(f.norm(), 0.0);
  EXPECT_EQ(gradient_objective(disc.ops(), 1.5, u, chi, u), 0.0);
  EXPECT_EQ(objective(u, u, disc.ops()), 0.0);
  const Trajectory uc = solve_state_coarse(disc, 1.5, grid);
  for (const auto& f : solve_adjoint_coarse(disc, 1.5, uc, uc).fields) EXPECT_EQ(f.norm(), 0.0);
}

TEST(Adjoint, FinalConditionIsZero) {
  const HeatDiscretization disc(5, HeatSource::manufactured());
  const TimeGrid grid{1.0, 5};
  const Trajectory u = solve_state_fine(disc, 1.0, grid);
  const Trajectory meas = solve_state_fine(disc, 2.0, grid);
  const Trajectory chi = solve_adjoint_fine(disc, 1.0, u, meas);
  EXPECT_EQ(chi.fields.back().norm(), 0.0);
  EXPECT_GT(chi.fields.front().norm(), 0.0);
}

TEST(Adjoint, NoiseIsDeterministicAndHasTheRequestedSpread) {
  const Vector a = measurement_noise(20000, 0.1, 42, 3, 7);
  const Vector b = measurement_noise(20000, 0.1, 42, 3, 7);
  EXPECT_EQ((a - b).norm(), 0.0);
  EXPECT_GT((a - measurement_noise(20000, 0.1, 42, 3, 8)).norm(), 0.0);
  EXPECT_GT((a - measurement_noise(20000, 0.1, 42, 4, 7)).norm(), 0.0);
  EXPECT_GT((a - measurement_noise(20000, 0.1, 43, 3, 7)).norm(), 0.0);
  EXPECT_NEAR(a.mean(), 0.0, 5e-3);
  EXPECT_NEAR(std::sqrt(a.squaredNorm() / a.size()), 0.1, 3e-3);
  EXPECT_EQ(measurement_noise(10, 0.0, 1, 0, 0).norm(), 0.0);
}

TEST(Adjoint, MisalignedTrajectoriesAreRejected) {
  const HeatDiscretization disc(4, HeatSource::manufactured());
  const Trajectory u = solve_state_fine(disc, 1.0, {1.0, 4});
  const Trajectory v = solve_state_fine(disc, 1.0, {1.0, 5});
  EXPECT_THROW(objective(u, v, disc.ops()), InvalidArgument);
}
