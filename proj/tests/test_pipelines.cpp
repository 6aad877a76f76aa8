#include "nirb/instrumentation.hpp"
#include "nirb/pipelines.hpp"

#include <gtest/gtest.h>

using namespace nirb;

namespace {

HeatTwoGrid small_heat() { return HeatTwoGrid(12, 4, {1.0, 12}, {1.0, 4}); }

std::vector<Vector> mus(std::initializer_list<double> values) {
  std::vector<Vector> out;
  for (double v : values) out.push_back(Vector::Constant(1, v));
  return out;
}

double relative_h1(const Trajectory& ref, const Trajectory& approx, const SpMat& k) {
  return relative_linf_error(ref, approx, k);
}

}  // namespace

TEST(Pipelines, SingleTrainingParameterGivesOneMode) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 1;
  o.with_gp = false;
  const OfflineArtifacts art = offline_direct(problem, mus({1.0}), o);
  EXPECT_EQ(art.sensitivities[0].basis.size(), 1);
  EXPECT_EQ(art.sensitivities[0].rectification.matrices[0].rows(), 1);
  EXPECT_EQ(art.sensitivities[0].rectification.steps(), 13);
}

TEST(Pipelines, IdentityRectificationEqualsClassical) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 3;
  o.with_gp = false;
  OfflineArtifacts art = offline_direct(problem, mus({0.5, 1.0, 2.0, 4.0}), o);
  for (auto& m : art.sensitivities[0].rectification.matrices) m = Matrix::Identity(m.rows(), m.cols());
  const Vector mu = Vector::Constant(1, 1.5);
  const Trajectory a = online_classical(problem, mu, art, 0).trajectory;
  const Trajectory b = online_rectified(problem, mu, art, 0).trajectory;
  for (int n = 0; n < a.levels(); ++n) EXPECT_LT((a.fields[n] - b.fields[n]).norm(), 1e-12);
}

TEST(Pipelines, ZeroCoarseSolutionGivesZeroOutput) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 2;
  o.with_gp = false;
  const OfflineArtifacts art = offline_direct(problem, mus({1.0, 2.0, 3.0}), o);
  const Trajectory zero(problem.space().coarse_grid, problem.coarse().size());
  const Matrix c = art.sensitivities[0].plain(zero, problem.space());
  EXPECT_EQ(c.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(art.sensitivities[0].rectified(zero, problem.space()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Pipelines, ClassicalOutputLiesInTheSpan) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 3;
  o.with_gp = false;
  const OfflineArtifacts art = offline_direct(problem, mus({0.5, 1.0, 2.0}), o);
  const Trajectory r = online_classical(problem, Vector::Constant(1, 1.2), art, 0).trajectory;
  const ReducedBasis& b = art.sensitivities[0].basis;
  for (const auto& f : r.fields) {
    const Vector residual = f - reconstruct(project_coefficients(f, b, problem.space().mass), b);
    EXPECT_LT((b.modes.transpose() * (problem.space().mass * residual)).norm(), 1e-8 * std::max(1.0, f.norm()));
    EXPECT_LT(residual.norm(), 1e-8 * std::max(1.0, f.norm()));
  }
}

TEST(Pipelines, RectifiedBetweenTrueProjectionAndPlain) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 3;
  o.with_gp = false;
  const auto params = mus({0.5, 1.0, 2.0, 4.0});
  const OfflineArtifacts art = offline_direct(problem, params, o);
  for (const Vector& mu : {params[1], Vector(Vector::Constant(1, 1.5))}) {
    const Trajectory fine_state = problem.fine_state(mu);
    const Trajectory fine = problem.fine_sensitivities(mu, fine_state)[0];
    const double plain = relative_h1(fine, online_classical(problem, mu, art, 0).trajectory, problem.error_gram());
    const double rect = relative_h1(fine, online_rectified(problem, mu, art, 0).trajectory, problem.error_gram());
    const double tp =
        true_projection_error(fine, art.sensitivities[0].basis, problem.space().mass, problem.error_gram());
    EXPECT_LT(rect, plain);
    EXPECT_GE(rect, 0.8 * tp);
  }
}

TEST(Pipelines, GpUsesExactlyOneCoarseSolveForOneParameter) {
  const HeatTwoGrid problem = small_heat();
  OfflineOptions o;
  o.reduction.modes = 2;
  o.state_modes = 2;
  o.gp.kind = KernelKind::dot_product;
  const OfflineArtifacts art = offline_direct(problem, mus({0.5, 1.0, 2.0, 4.0}), o);
  const long before = coarse_solve_count();
  const auto out = online_gp(problem, Vector::Constant(1, 1.5), art);
  EXPECT_EQ(coarse_solve_count() - before, 1);
  EXPECT_EQ(out.size(), 1u);
  const long mid = coarse_solve_count();
  (void)online_rectified(problem, Vector::Constant(1, 1.5), art, 0);
  EXPECT_EQ(coarse_solve_count() - mid, 2);
}

TEST(Pipelines, GpUsesExactlyOneCoarseSolveForThreeParameters) {
  const BrusselatorTwoGrid problem(6, 3, {0.4, 8}, {0.4, 4},
                                   {BrusselatorParameter::a, BrusselatorParameter::b, BrusselatorParameter::alpha});
  std::vector<Vector> params;
  for (double a : {2.8, 3.2}) {
    for (double b : {2.0, 3.0}) params.push_back(BrusselatorTwoGrid::pack({a, b, 0.01}));
  }
  OfflineOptions o;
  o.reduction.modes = 2;
  o.state_modes = 2;
  o.gp.kind = KernelKind::dot_product;
  const OfflineArtifacts art = offline_direct(problem, params, o);
  const long before = coarse_solve_count();
  const auto out = online_gp(problem, BrusselatorTwoGrid::pack({3.0, 2.5, 0.01}), art);
  EXPECT_EQ(coarse_solve_count() - before, 1);
  EXPECT_EQ(out.size(), 3u);
}

TEST(Pipelines, LeaveOneOutNeedsTwoParameters) {
  const HeatTwoGrid problem = small_heat();
  const auto snaps = generate_snapshots(problem, mus({1.0}));
  LooCase c;
  c.parameter = snaps[0].parameter;
  c.fine_state = &snaps[0].fine_state;
  c.coarse_state = &snaps[0].coarse_state;
  c.fine = {&snaps[0].fine_sensitivities[0]};
  c.coarse = {&snaps[0].coarse_sensitivities[0]};
  EXPECT_THROW(leave_one_out({c}, problem.space(), {}), InvalidArgument);
}

TEST(Pipelines, ExactMeasurementsGiveSmallGradient) {
  const HeatTwoGrid problem = small_heat();
  const MeasurementProvider own = [&](const Vector& mu, bool fine) {
    return fine ? problem.fine_state(mu) : problem.coarse_state(mu);
  };
  const MeasurementProvider other = [&](const Vector&, bool fine) {
    return fine ? problem.fine_state(Vector::Constant(1, 3.0)) : problem.coarse_state(Vector::Constant(1, 3.0));
  };
  const auto params = mus({0.5, 1.0, 2.0, 4.0});
  const Vector mu = Vector::Constant(1, 1.5);
  const AdjointArtifacts own_art = offline_adjoint(problem, generate_adjoint_snapshots(problem, params, own), {4, 0.0, 1e-10});
  const AdjointResult r = online_adjoint(problem, mu, own_art, own);
  for (const auto& f : r.adjoint.trajectory.fields) EXPECT_LT(f.norm(), 1e-12);
  const AdjointArtifacts other_art =
      offline_adjoint(problem, generate_adjoint_snapshots(problem, params, other), {4, 0.0, 1e-10});
  const AdjointResult s = online_adjoint(problem, mu, other_art, other);
  EXPECT_LT(std::abs(r.gradient[0]), 1e-3 * std::abs(s.gradient[0]));
}

TEST(Pipelines, SnapshotsForEveryParameter) {
  const HeatTwoGrid problem = small_heat();
  const auto snaps = generate_snapshots(problem, mus({1.0, 2.0}));
  ASSERT_EQ(snaps.size(), 2u);
  EXPECT_EQ(snaps[1].fine_state.levels(), 13);
  EXPECT_EQ(snaps[1].coarse_state.levels(), 5);
  EXPECT_EQ(snaps[1].fine_sensitivities.size(), 1u);
}
