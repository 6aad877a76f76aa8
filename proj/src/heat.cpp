#include "nirb/heat.hpp"

#include "nirb/instrumentation.hpp"

#include <algorithm>
#include <cmath>

namespace nirb {

double bump(double s) { return s * s * (1.0 - s) * (1.0 - s); }

namespace {

double bump_prime(double s) { return 2.0 * s - 6.0 * s * s + 4.0 * s * s * s; }

// -Δ(g(x)g(y)) / 2, the spatial shape of the diffusion term.
double laplacian_shape(double x, double y) {
  return (6.0 * x * x - 6.0 * x + 1.0) * bump(y) + (6.0 * y * y - 6.0 * y + 1.0) * bump(x);
}

}  // namespace

double HeatSource::operator()(double x, double y, double t) const {
  double value = 0.0;
  for (const auto& term : terms) value += term.time(t) * term.space(x, y);
  return value;
}

HeatSource HeatSource::manufactured() {
  HeatSource s;
  s.terms.push_back({[](double) { return 1.0; }, [](double x, double y) { return 10.0 * bump(x) * bump(y); }});
  s.terms.push_back({[](double t) { return t + 1.0; }, [](double x, double y) { return -20.0 * laplacian_shape(x, y); }});
  s.initial = [](double x, double y) { return -20.0 * laplacian_shape(x, y); };
  return s;
}

HeatSource HeatSource::zero() {
  HeatSource s;
  s.initial = [](double, double) { return 0.0; };
  return s;
}

double manufactured_solution(double x, double y, double t) { return 10.0 * (t + 1.0) * bump(x) * bump(y); }

GradientFunction manufactured_solution_at(double t) {
  GradientFunction g;
  g.value = [t](double x, double y) { return manufactured_solution(x, y, t); };
  g.gradient = [t](double x, double y) {
    const double c = 10.0 * (t + 1.0);
    return std::array<double, 2>{c * bump_prime(x) * bump(y), c * bump(x) * bump_prime(y)};
  };
  return g;
}

HeatDiscretization::HeatDiscretization(int subdivisions, HeatSource source)
    : mesh_(build_structured_mesh(subdivisions)), ops_(assemble_operators(mesh_)), source_(std::move(source)) {
  for (const auto& term : source_.terms) term_loads_.push_back(load_vector(mesh_, term.space));
  unit_initial_ = source_.initial ? solve_elliptic(1.0, source_.initial, mesh_, ops_) : Vector::Zero(size());
}

Vector HeatDiscretization::load(double t) const {
  Vector b = Vector::Zero(size());
  for (size_t k = 0; k < term_loads_.size(); ++k) b += source_.terms[k].time(t) * term_loads_[k];
  return b;
}

Vector HeatDiscretization::initial_state(double mu) const {
  if (!(mu > 0.0)) throw InvalidArgument("heat: diffusivity must be positive");
  return unit_initial_ / mu;
}

namespace {

void check_state(const HeatDiscretization& disc, const Trajectory& state) {
  if (state.levels() < 2 || state.field_size() != disc.size()) {
    throw InvalidArgument("heat: state trajectory does not match the discretization");
  }
}

}  // namespace

void march_fine(const HeatDiscretization& disc, double mu, const TimeGrid& grid, const FineObserver& observe) {
  const FemOperators& ops = disc.ops();
  const double dt = grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (dt * mu) * ops.stiffness), ops.interior, ops.size());
  Vector u = disc.initial_state(mu);
  Vector psi = -u / mu;
  observe(0, u, psi);
  for (int n = 1; n <= grid.steps; ++n) {
    u = solver.solve(ops.mass * u + dt * disc.load(grid.time(n)));
    psi = solver.solve(ops.mass * psi - dt * (ops.stiffness * u));
    observe(n, u, psi);
  }
}

StateAndSensitivity solve_fine_pair(const HeatDiscretization& disc, double mu, const TimeGrid& grid) {
  StateAndSensitivity out{Trajectory(grid, 0), Trajectory(grid, 0)};
  march_fine(disc, mu, grid, [&](int n, const Vector& u, const Vector& psi) {
    out.state.fields[n] = u;
    out.sensitivity.fields[n] = psi;
  });
  return out;
}

Trajectory solve_state_fine(const HeatDiscretization& disc, double mu, const TimeGrid& grid) {
  const FemOperators& ops = disc.ops();
  const double dt = grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (dt * mu) * ops.stiffness), ops.interior, ops.size());
  Trajectory out(grid, 0);
  out.fields[0] = disc.initial_state(mu);
  for (int n = 1; n <= grid.steps; ++n) {
    out.fields[n] = solver.solve(ops.mass * out.fields[n - 1] + dt * disc.load(grid.time(n)));
  }
  return out;
}

Trajectory solve_sensitivity_fine(const HeatDiscretization& disc, double mu, const Trajectory& state) {
  check_state(disc, state);
  const FemOperators& ops = disc.ops();
  const double dt = state.grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (dt * mu) * ops.stiffness), ops.interior, ops.size());
  Trajectory out(state.grid, 0);
  out.fields[0] = -state.fields[0] / mu;
  for (int n = 1; n <= state.grid.steps; ++n) {
    out.fields[n] = solver.solve(ops.mass * out.fields[n - 1] - dt * (ops.stiffness * state.fields[n]));
  }
  return out;
}

Trajectory solve_state_coarse(const HeatDiscretization& disc, double mu, const TimeGrid& grid) {
  count_coarse_solve();
  const FemOperators& ops = disc.ops();
  const double dt = grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (0.5 * dt * mu) * ops.stiffness), ops.interior, ops.size());
  const SpMat explicit_part = ops.mass - (0.5 * dt * mu) * ops.stiffness;
  Trajectory out(grid, 0);
  out.fields[0] = disc.initial_state(mu);
  for (int m = 1; m <= grid.steps; ++m) {
    const double t_half = 0.5 * (grid.time(m - 1) + grid.time(m));
    out.fields[m] = solver.solve(explicit_part * out.fields[m - 1] + dt * disc.load(t_half));
  }
  return out;
}

Trajectory solve_sensitivity_coarse(const HeatDiscretization& disc, double mu, const Trajectory& state) {
  check_state(disc, state);
  count_coarse_solve();
  const FemOperators& ops = disc.ops();
  const double dt = state.grid.dt();
  const DirichletSolver solver(SpMat(ops.mass + (0.5 * dt * mu) * ops.stiffness), ops.interior, ops.size());
  const SpMat explicit_part = ops.mass - (0.5 * dt * mu) * ops.stiffness;
  Trajectory out(state.grid, 0);
  out.fields[0] = -state.fields[0] / mu;
  for (int m = 1; m <= state.grid.steps; ++m) {
    const Vector averaged = 0.5 * (state.fields[m] + state.fields[m - 1]);
    out.fields[m] = solver.solve(explicit_part * out.fields[m - 1] - dt * (ops.stiffness * averaged));
  }
  return out;
}

StateAndSensitivity solve_coarse_pair(const HeatDiscretization& disc, double mu, const TimeGrid& grid) {
  StateAndSensitivity out;
  out.state = solve_state_coarse(disc, mu, grid);
  out.sensitivity = solve_sensitivity_coarse(disc, mu, out.state);
  return out;
}

TimeStencil quadratic_stencil(const TimeGrid& coarse, double t) {
  if (coarse.steps < 2) throw InvalidArgument("quadratic interpolation needs at least 3 coarse levels");
  const double s = t / coarse.dt();
  if (s < -1e-9 || s > coarse.steps + 1e-9) throw InvalidArgument("quadratic interpolation: time outside [0, T]");
  int m = static_cast<int>(std::ceil(s - 1e-9));
  m = std::clamp(m, 1, coarse.steps);
  TimeStencil st;
  st.first = std::max(0, m - 2);
  const double a = st.first;
  const double b = a + 1.0;
  const double c = a + 2.0;
  st.weights[0] = (s - b) * (s - c) / ((a - b) * (a - c));
  st.weights[1] = (s - a) * (s - c) / ((b - a) * (b - c));
  st.weights[2] = (s - a) * (s - b) / ((c - a) * (c - b));
  return st;
}

Trajectory quadratic_time_interpolate(const Trajectory& coarse, const TimeGrid& target) {
  if (coarse.levels() < 3) throw InvalidArgument("quadratic interpolation needs at least 3 coarse levels");
  if (std::abs(coarse.grid.final_time - target.final_time) > 1e-12) {
    throw InvalidArgument("quadratic interpolation: grids span different intervals");
  }
  Trajectory out(target, coarse.field_size());
  for (int n = 0; n <= target.steps; ++n) {
    const TimeStencil st = quadratic_stencil(coarse.grid, target.time(n));
    out.fields[n] = st.weights[0] * coarse.fields[st.first] + st.weights[1] * coarse.fields[st.first + 1] +
                    st.weights[2] * coarse.fields[st.first + 2];
  }
  return out;
}

}  // namespace nirb
