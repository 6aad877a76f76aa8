#include "nirb/pipelines.hpp"

#include "nirb/adjoint.hpp"
#include "nirb/transfer.hpp"

#include <chrono>

namespace nirb {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

FieldSpace make_field_space(const Mesh& fine_mesh, const FemOperators& fine_ops, const Mesh& coarse_mesh,
                            int components, const TimeGrid& fine_grid, const TimeGrid& coarse_grid) {
  FieldSpace s;
  s.mass = block_diagonal(fine_ops.mass, components);
  s.stiffness = block_diagonal(fine_ops.stiffness, components);
  s.transfer = block_diagonal(interpolation_matrix(coarse_mesh, fine_mesh), components);
  s.fine_grid = fine_grid;
  s.coarse_grid = coarse_grid;
  return s;
}

Matrix coarse_coefficients(const Trajectory& coarse, const Matrix& transferred_modes, const TimeGrid& fine_grid) {
  if (coarse.field_size() != transferred_modes.rows()) {
    throw InvalidArgument("coarse coefficients: trajectory does not live on the coarse mesh");
  }
  Matrix per_level(coarse.levels(), transferred_modes.cols());
  for (int m = 0; m < coarse.levels(); ++m) per_level.row(m) = (transferred_modes.transpose() * coarse.fields[m]).transpose();
  Matrix out(fine_grid.levels(), transferred_modes.cols());
  for (int n = 0; n <= fine_grid.steps; ++n) {
    const TimeStencil st = quadratic_stencil(coarse.grid, fine_grid.time(n));
    out.row(n) = st.weights[0] * per_level.row(st.first) + st.weights[1] * per_level.row(st.first + 1) +
                 st.weights[2] * per_level.row(st.first + 2);
  }
  return out;
}

Matrix TwoGridReduction::plain(const Trajectory& coarse, const FieldSpace& space) const {
  return coarse_coefficients(coarse, transferred_modes, space.fine_grid);
}

Matrix TwoGridReduction::rectified(const Trajectory& coarse, const FieldSpace& space) const {
  return rectification.apply_all(plain(coarse, space));
}

TwoGridReduction build_reduction(const std::vector<const Trajectory*>& fine, const std::vector<const Trajectory*>& coarse,
                                 const FieldSpace& space, const ReductionOptions& options) {
  if (fine.size() != coarse.size() || fine.empty()) throw InvalidArgument("reduction: fine and coarse sets differ");
  TwoGridReduction r;
  r.basis = h1_orthogonalize(greedy_select(fine, space.mass, {options.greedy_tolerance, options.modes}), space.stiffness);
  r.transferred_modes = space.transfer.transpose() * (space.mass * r.basis.modes);
  for (size_t k = 0; k < fine.size(); ++k) {
    if (!same_grid(fine[k]->grid, space.fine_grid) || !same_grid(coarse[k]->grid, space.coarse_grid)) {
      throw InvalidArgument("reduction: snapshot on the wrong time grid");
    }
    r.fine_tables.push_back(project_trajectory(*fine[k], r.basis, space.mass));
    r.coarse_tables.push_back(r.plain(*coarse[k], space));
  }
  r.rectification = build_rectification(per_level(r.coarse_tables), per_level(r.fine_tables), options.delta);
  return r;
}

Vector flatten(const Matrix& table) {
  // Time-major: all modes of level 0, then level 1, ...
  const Matrix t = table.transpose();
  return Eigen::Map<const Vector>(t.data(), t.size());
}

GpReduction build_gp(const std::vector<Matrix>& input_tables, const std::vector<Matrix>& output_tables,
                     const GprOptions& options) {
  if (input_tables.size() != output_tables.size() || input_tables.empty()) {
    throw InvalidArgument("gp reduction: input and output sets differ");
  }
  Matrix x(static_cast<Eigen::Index>(input_tables.size()), input_tables.front().size());
  Matrix y(static_cast<Eigen::Index>(output_tables.size()), output_tables.front().size());
  for (size_t k = 0; k < input_tables.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = flatten(input_tables[k]).transpose();
    y.row(static_cast<Eigen::Index>(k)) = flatten(output_tables[k]).transpose();
  }
  GpReduction g;
  g.model = GprModel::fit(x, y, options);
  g.levels = static_cast<int>(output_tables.front().rows());
  g.modes = static_cast<int>(output_tables.front().cols());
  return g;
}

Matrix GpReduction::predict(const Matrix& input_table) const {
  const Vector mean = model.predict(flatten(input_table)).mean;
  Matrix out(levels, modes);
  for (int n = 0; n < levels; ++n) out.row(n) = mean.segment(static_cast<Eigen::Index>(n) * modes, modes).transpose();
  return out;
}

HeatTwoGrid::HeatTwoGrid(int fine_subdivisions, int coarse_subdivisions, const TimeGrid& fine_grid,
                         const TimeGrid& coarse_grid, const HeatSource& source)
    : fine_(fine_subdivisions, source),
      coarse_(coarse_subdivisions, source),
      space_(make_field_space(fine_.mesh(), fine_.ops(), coarse_.mesh(), 1, fine_grid, coarse_grid)) {}

Trajectory HeatTwoGrid::fine_state(const Vector& mu) const { return solve_state_fine(fine_, mu[0], space_.fine_grid); }

std::vector<Trajectory> HeatTwoGrid::fine_sensitivities(const Vector& mu, const Trajectory& state) const {
  return {solve_sensitivity_fine(fine_, mu[0], state)};
}

Trajectory HeatTwoGrid::coarse_state(const Vector& mu) const {
  return solve_state_coarse(coarse_, mu[0], space_.coarse_grid);
}

std::vector<Trajectory> HeatTwoGrid::coarse_sensitivities(const Vector& mu, const Trajectory& state) const {
  return {solve_sensitivity_coarse(coarse_, mu[0], state)};
}

Trajectory HeatTwoGrid::fine_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const {
  return solve_adjoint_fine(fine_, mu[0], state, measurements);
}

Trajectory HeatTwoGrid::coarse_adjoint(const Vector& mu, const Trajectory& state,
                                       const Trajectory& measurements) const {
  return solve_adjoint_coarse(coarse_, mu[0], state, measurements);
}

Vector HeatTwoGrid::gradient(const Vector& mu, const Trajectory& state, const Trajectory& adjoint,
                             const Trajectory& measurements) const {
  Vector g(1);
  g[0] = gradient_objective(fine_.ops(), mu[0], state, adjoint, measurements);
  return g;
}

TwoGridProblem::Solution TwoGridProblem::fine_solution(const Vector& mu) const {
  Solution s;
  s.state = fine_state(mu);
  s.sensitivities = fine_sensitivities(mu, s.state);
  return s;
}

TwoGridProblem::Solution TwoGridProblem::coarse_solution(const Vector& mu) const {
  Solution s;
  s.state = coarse_state(mu);
  s.sensitivities = coarse_sensitivities(mu, s.state);
  return s;
}

BrusselatorTwoGrid::BrusselatorTwoGrid(int fine_subdivisions, int coarse_subdivisions, const TimeGrid& fine_grid,
                                       const TimeGrid& coarse_grid, std::vector<BrusselatorParameter> parameters)
    : fine_(fine_subdivisions),
      coarse_(coarse_subdivisions),
      parameters_(std::move(parameters)),
      space_(make_field_space(fine_.mesh(), fine_.ops(), coarse_.mesh(), 2, fine_grid, coarse_grid)),
      error_gram_(block_diagonal(fine_.ops().stiffness, 2)) {
  if (parameters_.empty()) throw InvalidArgument("brusselator: no sensitivity parameters requested");
}

BrusselatorParams BrusselatorTwoGrid::unpack(const Vector& mu) {
  if (mu.size() != 3) throw InvalidArgument("brusselator: parameters are (a, b, alpha)");
  return {mu[0], mu[1], mu[2]};
}

Vector BrusselatorTwoGrid::pack(const BrusselatorParams& p) {
  Vector v(3);
  v << p.a, p.b, p.alpha;
  return v;
}

Trajectory BrusselatorTwoGrid::fine_state(const Vector& mu) const {
  return solve_brusselator(fine_, unpack(mu), space_.fine_grid, TimeScheme::euler_fine);
}

std::vector<Trajectory> BrusselatorTwoGrid::fine_sensitivities(const Vector& mu, const Trajectory& state) const {
  return solve_brusselator_tangents(fine_, unpack(mu), state, parameters_, TimeScheme::euler_fine);
}

Trajectory BrusselatorTwoGrid::coarse_state(const Vector& mu) const {
  return solve_brusselator(coarse_, unpack(mu), space_.coarse_grid, TimeScheme::cn_coarse);
}

std::vector<Trajectory> BrusselatorTwoGrid::coarse_sensitivities(const Vector& mu, const Trajectory& state) const {
  return solve_brusselator_tangents(coarse_, unpack(mu), state, parameters_, TimeScheme::cn_coarse);
}

TwoGridProblem::Solution BrusselatorTwoGrid::fine_solution(const Vector& mu) const {
  auto r = solve_brusselator_with_tangents(fine_, unpack(mu), space_.fine_grid, parameters_, TimeScheme::euler_fine);
  return {std::move(r.state), std::move(r.tangents)};
}

TwoGridProblem::Solution BrusselatorTwoGrid::coarse_solution(const Vector& mu) const {
  auto r = solve_brusselator_with_tangents(coarse_, unpack(mu), space_.coarse_grid, parameters_, TimeScheme::cn_coarse);
  return {std::move(r.state), std::move(r.tangents)};
}

Trajectory BrusselatorTwoGrid::fine_adjoint(const Vector& mu, const Trajectory& state,
                                            const Trajectory& measurements) const {
  return solve_brusselator_adjoint(fine_, unpack(mu), state, measurements, TimeScheme::euler_fine);
}

Trajectory BrusselatorTwoGrid::coarse_adjoint(const Vector& mu, const Trajectory& state,
                                              const Trajectory& measurements) const {
  return solve_brusselator_adjoint(coarse_, unpack(mu), state, measurements, TimeScheme::cn_coarse);
}

Vector BrusselatorTwoGrid::gradient(const Vector&, const Trajectory& state, const Trajectory& adjoint,
                                    const Trajectory&) const {
  Vector g(parameter_count());
  for (int p = 0; p < parameter_count(); ++p) g[p] = brusselator_gradient(fine_, parameters_[p], state, adjoint);
  return g;
}

std::vector<SnapshotPair> generate_snapshots(const TwoGridProblem& problem, const std::vector<Vector>& parameters,
                                             bool with_coarse) {
  std::vector<SnapshotPair> out(parameters.size());
  std::vector<std::string> failures(parameters.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(parameters.size()); ++k) {
    try {
      SnapshotPair& s = out[k];
      s.parameter = parameters[k];
      auto fine = problem.fine_solution(s.parameter);
      s.fine_state = std::move(fine.state);
      s.fine_sensitivities = std::move(fine.sensitivities);
      if (with_coarse) {
        auto coarse = problem.coarse_solution(s.parameter);
        s.coarse_state = std::move(coarse.state);
        s.coarse_sensitivities = std::move(coarse.sensitivities);
      }
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw NumericalError("snapshot generation failed: " + f);
  }
  return out;
}

OfflineArtifacts offline_direct(const TwoGridProblem& problem, const std::vector<SnapshotPair>& training,
                                const OfflineOptions& options) {
  if (training.empty()) throw InvalidArgument("offline: empty training set");
  const FieldSpace& space = problem.space();
  OfflineArtifacts a;
  std::vector<const Trajectory*> fine_states;
  std::vector<const Trajectory*> coarse_states;
  for (const auto& s : training) {
    fine_states.push_back(&s.fine_state);
    coarse_states.push_back(&s.coarse_state);
  }
  ReductionOptions state_options = options.reduction;
  state_options.modes = options.state_modes;
  a.state = build_reduction(fine_states, coarse_states, space, state_options);
  for (int p = 0; p < problem.parameter_count(); ++p) {
    std::vector<const Trajectory*> fine;
    std::vector<const Trajectory*> coarse;
    for (const auto& s : training) {
      fine.push_back(&s.fine_sensitivities.at(p));
      coarse.push_back(&s.coarse_sensitivities.at(p));
    }
    a.sensitivities.push_back(build_reduction(fine, coarse, space, options.reduction));
    if (options.with_gp) a.gp.push_back(build_gp(a.state.coarse_tables, a.sensitivities.back().fine_tables, options.gp));
  }
  return a;
}

OfflineArtifacts offline_direct(const TwoGridProblem& problem, const std::vector<Vector>& training,
                                const OfflineOptions& options) {
  return offline_direct(problem, generate_snapshots(problem, training), options);
}

NirbResult online_classical(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts,
                            int p) {
  const auto start = std::chrono::steady_clock::now();
  const Trajectory state = problem.coarse_state(mu);
  const Trajectory sens = problem.coarse_sensitivities(mu, state).at(p);
  const TwoGridReduction& r = artifacts.sensitivities.at(p);
  NirbResult out;
  out.trajectory = reconstruct_trajectory(r.plain(sens, problem.space()), r.basis, problem.space().fine_grid);
  out.variant = "plain";
  out.seconds = seconds_since(start);
  return out;
}

NirbResult online_rectified(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts,
                            int p) {
  const auto start = std::chrono::steady_clock::now();
  const Trajectory state = problem.coarse_state(mu);
  const Trajectory sens = problem.coarse_sensitivities(mu, state).at(p);
  const TwoGridReduction& r = artifacts.sensitivities.at(p);
  NirbResult out;
  out.trajectory = reconstruct_trajectory(r.rectified(sens, problem.space()), r.basis, problem.space().fine_grid);
  out.variant = "rectified";
  out.seconds = seconds_since(start);
  return out;
}

std::vector<NirbResult> online_gp(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts) {
  if (artifacts.gp.size() != artifacts.sensitivities.size()) throw InvalidArgument("online GP: artifacts have no GP");
  const auto start = std::chrono::steady_clock::now();
  const Trajectory state = problem.coarse_state(mu);
  const Matrix input = artifacts.state.plain(state, problem.space());
  std::vector<NirbResult> out;
  for (size_t p = 0; p < artifacts.gp.size(); ++p) {
    NirbResult r;
    r.trajectory = reconstruct_trajectory(artifacts.gp[p].predict(input), artifacts.sensitivities[p].basis,
                                          problem.space().fine_grid);
    r.variant = "gp";
    out.push_back(std::move(r));
  }
  const double elapsed = seconds_since(start);
  for (auto& r : out) r.seconds = elapsed;
  return out;
}

std::vector<AdjointSnapshots> generate_adjoint_snapshots(const TwoGridProblem& problem,
                                                         const std::vector<Vector>& parameters,
                                                         const MeasurementProvider& measurements) {
  std::vector<AdjointSnapshots> out(parameters.size());
  std::vector<std::string> failures(parameters.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(parameters.size()); ++k) {
    try {
      AdjointSnapshots& s = out[k];
      s.parameter = parameters[k];
      s.fine_state = problem.fine_state(s.parameter);
      s.fine_adjoint = problem.fine_adjoint(s.parameter, s.fine_state, measurements(s.parameter, true));
      s.coarse_state = problem.coarse_state(s.parameter);
      s.coarse_adjoint = problem.coarse_adjoint(s.parameter, s.coarse_state, measurements(s.parameter, false));
    } catch (const std::exception& e) {
      failures[k] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw NumericalError("adjoint snapshot generation failed: " + f);
  }
  return out;
}

AdjointArtifacts offline_adjoint(const TwoGridProblem& problem, const std::vector<AdjointSnapshots>& training,
                                 const ReductionOptions& options) {
  if (training.empty()) throw InvalidArgument("offline adjoint: empty training set");
  std::vector<const Trajectory*> fs, cs, fa, ca;
  for (const auto& s : training) {
    fs.push_back(&s.fine_state);
    cs.push_back(&s.coarse_state);
    fa.push_back(&s.fine_adjoint);
    ca.push_back(&s.coarse_adjoint);
  }
  AdjointArtifacts a;
  a.state = build_reduction(fs, cs, problem.space(), options);
  a.adjoint = build_reduction(fa, ca, problem.space(), options);
  return a;
}

AdjointResult online_adjoint(const TwoGridProblem& problem, const Vector& mu, const AdjointArtifacts& artifacts,
                             const MeasurementProvider& measurements) {
  const auto start = std::chrono::steady_clock::now();
  const FieldSpace& space = problem.space();
  const Trajectory state = problem.coarse_state(mu);
  const Trajectory chi = problem.coarse_adjoint(mu, state, measurements(mu, false));
  AdjointResult out;
  out.state.trajectory = reconstruct_trajectory(artifacts.state.rectified(state, space), artifacts.state.basis,
                                                space.fine_grid);
  out.state.variant = "rectified";
  out.adjoint.trajectory = reconstruct_trajectory(artifacts.adjoint.rectified(chi, space), artifacts.adjoint.basis,
                                                  space.fine_grid);
  out.adjoint.variant = "rectified";
  out.gradient = problem.gradient(mu, out.state.trajectory, out.adjoint.trajectory, measurements(mu, true));
  out.state.seconds = out.adjoint.seconds = seconds_since(start);
  return out;
}

std::vector<LooRow> leave_one_out(const std::vector<LooCase>& cases, const FieldSpace& space, const LooOptions& options) {
  if (cases.size() < 2) throw InvalidArgument("leave-one-out needs at least two parameters");
  std::vector<int> held = options.held_out;
  if (held.empty()) {
    for (int i = 0; i < static_cast<int>(cases.size()); ++i) held.push_back(i);
  }
  const size_t outputs = cases.front().fine.size();
  std::vector<LooRow> rows;
  for (int i : held) {
    if (i < 0 || i >= static_cast<int>(cases.size())) throw InvalidArgument("leave-one-out: bad held-out index");
    const LooCase& test = cases[i];
    std::vector<const LooCase*> train;
    for (int k = 0; k < static_cast<int>(cases.size()); ++k) {
      if (k != i) train.push_back(&cases[k]);
    }
    TwoGridReduction state;
    Matrix state_input;
    if (options.with_gp) {
      std::vector<const Trajectory*> fs, cs;
      for (const auto* c : train) {
        fs.push_back(c->fine_state);
        cs.push_back(c->coarse_state);
      }
      ReductionOptions so = options.reduction;
      so.modes = options.state_modes;
      state = build_reduction(fs, cs, space, so);
      state_input = state.plain(*test.coarse_state, space);
    }
    for (size_t p = 0; p < outputs; ++p) {
      std::vector<const Trajectory*> fine, coarse;
      for (const auto* c : train) {
        fine.push_back(c->fine.at(p));
        coarse.push_back(c->coarse.at(p));
      }
      const TwoGridReduction r = build_reduction(fine, coarse, space, options.reduction);
      const ReducedReference ref = reduce_reference(*test.fine_reference.at(p), r.basis.modes);
      const CompressedReference& coarse_ref = *test.coarse_reference.at(p);
      const double fine_scale = options.relative ? ref.norm : 1.0;
      const double coarse_scale = options.relative ? coarse_ref.linf_norm() : 1.0;

      LooRow row;
      row.parameter = test.parameter;
      row.output = static_cast<int>(p);
      const Matrix plain = r.plain(*test.coarse.at(p), space);
      row.plain = ref.linf_error(plain) / fine_scale;
      row.rectified = ref.linf_error(r.rectification.apply_all(plain)) / fine_scale;
      row.true_projection = ref.linf_error(project_trajectory(*test.fine.at(p), r.basis, space.mass)) / fine_scale;
      row.coarse = coarse_ref.linf_error(*test.coarse.at(p)) / coarse_scale;
      row.fine = test.fine_reference.at(p)->linf_error(*test.fine.at(p)) / fine_scale;
      if (options.with_gp) {
        const GpReduction gp = build_gp(state.coarse_tables, r.fine_tables, options.gp);
        row.gp = ref.linf_error(gp.predict(state_input)) / fine_scale;
      }
      row.eigenvalues = r.basis.eigenvalues;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace nirb
