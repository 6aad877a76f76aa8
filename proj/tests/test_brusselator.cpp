#include "nirb/brusselator.hpp"
#include "nirb/instrumentation.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nirb;

TEST(Brusselator, EquilibriumIsStationary) {
  const BrusselatorSystem sys(5);
  const BrusselatorParams p{3.0, 2.0, 0.01};
  const Vector eq = sys.constant_state(p.a, p.b / p.a);
  EXPECT_LT(sys.rhs(p, eq).cwiseAbs().maxCoeff(), 1e-13);
  const Trajectory u = solve_brusselator(sys, p, {1.0, 5}, TimeScheme::cn_coarse, {}, nullptr, &eq);
  EXPECT_LT((u.fields.back() - eq).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Brusselator, JacobianMatchesFiniteDifferences) {
  const BrusselatorSystem sys(4);
  const BrusselatorParams p{3.5, 2.5, 0.02};
  const Vector u = sys.default_initial_state();
  const SpMat j = sys.jacobian(p, u);
  Vector dir = Vector::LinSpaced(sys.size(), -1.0, 1.0);
  const double eps = 1e-6;
  const Vector fd = (sys.rhs(p, u + eps * dir) - sys.rhs(p, u - eps * dir)) / (2.0 * eps);
  EXPECT_LT((j * dir - fd).norm() / fd.norm(), 1e-7);
}

TEST(Brusselator, ParameterSourceMatchesFiniteDifferences) {
  const BrusselatorSystem sys(4);
  const BrusselatorParams p{3.5, 2.5, 0.02};
  const Vector u = sys.default_initial_state();
  for (auto which : {BrusselatorParameter::a, BrusselatorParameter::b, BrusselatorParameter::alpha}) {
    const double v = parameter_value(p, which), eps = 1e-6;
    const Vector fd =
        (sys.rhs(with_parameter(p, which, v + eps), u) - sys.rhs(with_parameter(p, which, v - eps), u)) / (2 * eps);
    EXPECT_LT((sys.parameter_source(which, u) - fd).norm(), 1e-7 * std::max(1.0, fd.norm())) << parameter_name(which);
  }
}

TEST(Brusselator, TangentsMatchFiniteDifferences) { EXPECT_LT(oracles::brusselator_tangent_fd(), 0.01); }

TEST(Brusselator, AdjointGradientMatchesFiniteDifferences) { EXPECT_LT(oracles::brusselator_gradient_fd(), 0.02); }

TEST(Brusselator, FusedTangentsEqualSeparateSolve) {
  const BrusselatorSystem sys(5);
  const BrusselatorParams p{3.0, 3.0, 0.01};
  const TimeGrid grid{0.6, 6};
  const std::vector<BrusselatorParameter> which{BrusselatorParameter::a, BrusselatorParameter::b};
  for (auto scheme : {TimeScheme::euler_fine, TimeScheme::cn_coarse}) {
    const BrusselatorSolution fused = solve_brusselator_with_tangents(sys, p, grid, which, scheme);
    const Trajectory u = solve_brusselator(sys, p, grid, scheme);
    const auto sep = solve_brusselator_tangents(sys, p, u, which, scheme);
    EXPECT_LT((fused.state.fields.back() - u.fields.back()).norm(), 1e-12);
    for (size_t k = 0; k < which.size(); ++k) {
      EXPECT_LT((fused.tangents[k].fields.back() - sep[k].fields.back()).norm(),
                1e-9 * sep[k].fields.back().norm());
    }
  }
}

TEST(Brusselator, LargeSystemStepSatisfiesItsEquation) {
  // above the direct-solver size, so the iterative path is exercised
  const BrusselatorSystem sys(46);
  ASSERT_GT(sys.size(), 4000);
  const BrusselatorParams p{3.0, 2.0, 0.01};
  const TimeGrid grid{0.05, 1};
  const Trajectory u = solve_brusselator(sys, p, grid, TimeScheme::euler_fine);
  const Vector residual =
      sys.block_mass() * (u.fields[1] - u.fields[0]) - grid.dt() * sys.rhs(p, u.fields[1]);
  EXPECT_LT(residual.norm(), 1e-9 * (sys.block_mass() * u.fields[1]).norm());
}

TEST(Brusselator, CrankNicolsonCountsOneCoarseSolve) {
  const BrusselatorSystem sys(3);
  const long before = coarse_solve_count();
  (void)solve_brusselator(sys, {}, {0.2, 2}, TimeScheme::cn_coarse);
  EXPECT_EQ(coarse_solve_count() - before, 1);
  (void)solve_brusselator(sys, {}, {0.2, 2}, TimeScheme::euler_fine);
  EXPECT_EQ(coarse_solve_count() - before, 1);
}

TEST(Brusselator, NewtonReportsIterations) {
  const BrusselatorSystem sys(4);
  NewtonReport report;
  (void)solve_brusselator(sys, {}, {0.5, 5}, TimeScheme::euler_fine, {}, &report);
  EXPECT_GE(report.max_iterations, 1);
  EXPECT_LE(report.max_iterations, 10);
  EXPECT_GE(report.total_iterations, 5);
}
