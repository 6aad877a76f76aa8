#include "nirb/fem.hpp"
#include "nirb/reference.hpp"
#include "nirb/transfer.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nirb;

namespace {

// y(x, y, t) on the reference mesh
Vector reference_field(const Mesh& m, double t) {
  return nodal_values(m, [t](double x, double y) { return std::sin(3 * x + t) * y * (1 - y) + t * x; });
}

}  // namespace

TEST(Reference, CompressedErrorEqualsDirectComputation) {
  const Mesh ref = build_structured_mesh(12), target = build_structured_mesh(5);
  const FemOperators ref_ops = assemble_operators(ref);
  const TimeGrid ref_grid{1.0, 12}, target_grid{1.0, 4};
  ReferenceCompressor comp(ref, ref_grid, ref_ops.stiffness, 1, {{5, 4}});
  for (int n = 0; n <= 12; ++n) comp.observe(n, reference_field(ref, ref_grid.time(n)));
  const CompressedReference c = comp.finish().front();
  ASSERT_EQ(c.levels(), 5);

  Trajectory approx(target_grid, target.node_count());
  for (int k = 0; k <= 4; ++k) approx.fields[k] = nodal_values(target, [](double x, double y) { return x * y; });
  const SpMat p = interpolation_matrix(target, ref);
  double direct = 0.0, norm = 0.0;
  for (int k = 0; k <= 4; ++k) {
    // target level k sits on reference level 3k
    const Vector y = reference_field(ref, target_grid.time(k));
    const Vector e = y - p * approx.fields[k];
    direct = std::max(direct, std::sqrt(e.dot(ref_ops.stiffness * e)));
    norm = std::max(norm, std::sqrt(y.dot(ref_ops.stiffness * y)));
  }
  EXPECT_NEAR(c.linf_error(approx), direct, 1e-10 * direct);
  EXPECT_NEAR(c.linf_norm(), norm, 1e-10 * norm);
}

TEST(Reference, CompressedInterpolatesBetweenReferenceLevels) {
  const Mesh ref = build_structured_mesh(4);
  const FemOperators ops = assemble_operators(ref);
  const TimeGrid ref_grid{1.0, 2}, target_grid{1.0, 4};
  ReferenceCompressor comp(ref, ref_grid, ops.mass, 1, {{4, 4}});
  const Vector one = Vector::Ones(ref.node_count());
  for (int n = 0; n <= 2; ++n) comp.observe(n, ref_grid.time(n) * one);
  const CompressedReference c = comp.finish().front();
  // y(t) = t: ‖y(1/4)‖²_M = 1/16
  EXPECT_NEAR(c.energies[1], 1.0 / 16.0, 1e-13);
}

TEST(Reference, ReducedReferenceAgreesWithFull) {
  const Mesh ref = build_structured_mesh(8), target = build_structured_mesh(4);
  const FemOperators ref_ops = assemble_operators(ref);
  const TimeGrid grid{1.0, 4};
  ReferenceCompressor comp(ref, grid, ref_ops.stiffness, 1, {{4, 4}});
  for (int n = 0; n <= 4; ++n) comp.observe(n, reference_field(ref, grid.time(n)));
  const CompressedReference c = comp.finish().front();
  Matrix modes(target.node_count(), 2);
  modes.col(0) = nodal_values(target, [](double x, double y) { return x * (1 - x) * y; });
  modes.col(1) = nodal_values(target, [](double x, double) { return x; });
  Matrix coef(5, 2);
  for (int n = 0; n <= 4; ++n) coef.row(n) << 0.3 * n, 1.0 - 0.1 * n;
  Trajectory full(grid, target.node_count());
  for (int n = 0; n <= 4; ++n) full.fields[n] = modes * coef.row(n).transpose();
  const ReducedReference r = reduce_reference(c, modes);
  EXPECT_NEAR(r.linf_error(coef), c.linf_error(full), 1e-10);
}

TEST(Reference, SamplerUsesNearestLevelsAndPointValues) {
  const TimeGrid ref_grid{1.0, 10}, target{1.0, 3};
  const auto levels = ReferenceSampler::nearest_levels(ref_grid, target);
  ASSERT_EQ(levels.size(), 4u);
  EXPECT_EQ(levels[0], 0);
  EXPECT_EQ(levels[1], 3);
  EXPECT_EQ(levels[2], 7);
  EXPECT_EQ(levels[3], 10);

  const Mesh ref = build_structured_mesh(6);
  ReferenceSampler s(ref, ref_grid, 1, {{3, 3}});
  auto lin = [](double x, double y) { return 2 * x - y; };
  for (int n = 0; n <= 10; ++n) s.observe(n, n * nodal_values(ref, lin));
  const Trajectory t = s.finish().front();
  const Mesh coarse = build_structured_mesh(3);
  EXPECT_LT((t.fields[2] - 7.0 * nodal_values(coarse, lin)).cwiseAbs().maxCoeff(), 1e-12);
}
