#include "nirb/adjoint.hpp"

#include "nirb/instrumentation.hpp"

#include <random>

namespace nirb {

double objective(const Trajectory& state, const Trajectory& measurements, const FemOperators& ops) {
  check_aligned(state, measurements, "objective");
  double total = 0.0;
  for (int n = 0; n < state.levels(); ++n) {
    const Vector e = state.fields[n] - measurements.fields[n];
    total += e.dot(ops.mass * e);
  }
  return 0.5 * total;
}

Trajectory solve_adjoint_fine(const HeatDiscretization& disc, double mu, const Trajectory& state,
                              const Trajectory& measurements) {
  check_aligned(state, measurements, "fine adjoint");
  const FemOperators& ops = disc.ops();
  const double dt = state.grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (dt * mu) * ops.stiffness), ops.interior, ops.size());
  Trajectory chi(state.grid, ops.size());
  for (int n = state.grid.steps; n >= 1; --n) {
    const Vector e = state.fields[n] - measurements.fields[n];
    chi.fields[n - 1] = solver.solve(ops.mass * (chi.fields[n] + dt * e));
  }
  return chi;
}

Trajectory solve_adjoint_coarse(const HeatDiscretization& disc, double mu, const Trajectory& state,
                                const Trajectory& measurements) {
  check_aligned(state, measurements, "coarse adjoint");
  count_coarse_solve();
  const FemOperators& ops = disc.ops();
  const double dt = state.grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (0.5 * dt * mu) * ops.stiffness), ops.interior, ops.size());
  const SpMat explicit_part = ops.mass - (0.5 * dt * mu) * ops.stiffness;
  Trajectory chi(state.grid, ops.size());
  for (int m = state.grid.steps; m >= 1; --m) {
    const Vector e = (state.fields[m] - measurements.fields[m]) + (state.fields[m - 1] - measurements.fields[m - 1]);
    chi.fields[m - 1] = solver.solve(explicit_part * chi.fields[m] + (0.5 * dt) * (ops.mass * e));
  }
  return chi;
}

double gradient_objective(const FemOperators& ops, double mu, const Trajectory& state, const Trajectory& adjoint,
                          const Trajectory& measurements) {
  check_aligned(state, adjoint, "gradient");
  check_aligned(state, measurements, "gradient");
  const double dt = state.grid.dt();
  double g = 0.0;
  for (int n = 1; n < state.levels(); ++n) g -= adjoint.fields[n - 1].dot(ops.stiffness * state.fields[n]);
  const Vector psi0 = -state.fields[0] / mu;
  const Vector e0 = state.fields[0] - measurements.fields[0];
  g += (e0 + adjoint.fields[0] / dt).dot(ops.mass * psi0);
  return g;
}

Vector measurement_noise(int nodes, double sigma, std::uint64_t seed, int parameter_id, int level) {
  Vector noise = Vector::Zero(nodes);
  if (sigma == 0.0) return noise;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(parameter_id), static_cast<std::uint32_t>(level)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, sigma);
  for (int i = 0; i < nodes; ++i) noise[i] = normal(rng);
  return noise;
}

}  // namespace nirb
