#include "nirb/heat_study.hpp"

#include "nirb/adjoint.hpp"
#include "nirb/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nirb {

std::string GridPair::label() const {
  std::ostringstream s;
  s << fine_size << "-" << coarse_size;
  return s.str();
}

GridPair make_grid_pair(double fine_size, double coarse_size, double final_time) {
  if (!(fine_size > 0.0) || !(coarse_size > 0.0)) throw ConfigError("grid sizes must be positive");
  GridPair p;
  p.fine_size = fine_size;
  p.coarse_size = coarse_size;
  p.fine_subdivisions = subdivisions_for_size(fine_size);
  p.fine_steps = TimeGrid::with_step(final_time, fine_size).steps;
  p.coarse_subdivisions = subdivisions_for_size(coarse_size);
  p.coarse_steps = TimeGrid::with_step(final_time, coarse_size).steps;
  if (p.coarse_steps < 2) throw ConfigError("coarse grid needs at least two time steps for quadratic interpolation");
  return p;
}

HeatStudyConfig default_heat_config() {
  HeatStudyConfig c;
  for (int i = 1; i <= 19; ++i) c.mus.push_back(0.5 * i);
  for (auto [f, g] : {std::pair{0.01, 0.1}, {0.02, 0.1414}, {0.05, 0.22}, {0.1, 0.32}}) {
    c.pairs.push_back(make_grid_pair(f, g, c.final_time));
  }
  c.gp.kind = KernelKind::dot_product;
  return c;
}

HeatReferenceBank::HeatReferenceBank(SnapshotStore& store, HeatStudyConfig config, Progress progress)
    : store_(store),
      config_(std::move(config)),
      progress_(std::move(progress)),
      reference_mesh_(build_structured_mesh(config_.reference_subdivisions)) {}

std::string HeatReferenceBank::key(const char* role, double mu, const TargetSpec& target) const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "heat/T%g/ref%dx%d/adj%dx%d/mu%.6g/%s/%dx%d", config_.final_time,
                config_.reference_subdivisions, config_.reference_steps, config_.adjoint_reference_subdivisions,
                config_.adjoint_reference_steps, mu, role, target.subdivisions, target.steps);
  return buf;
}

std::vector<TargetSpec> HeatReferenceBank::error_targets() const {
  std::vector<TargetSpec> out;
  auto add = [&](TargetSpec t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const GridPair& p : config_.pairs) {
    add(p.fine_target());
    add(p.coarse_target());
  }
  return out;
}

std::vector<TargetSpec> HeatReferenceBank::measurement_targets() const {
  std::vector<TargetSpec> out = error_targets();
  const TargetSpec adj{config_.adjoint_reference_subdivisions, config_.adjoint_reference_steps};
  if (std::find(out.begin(), out.end(), adj) == out.end()) out.push_back(adj);
  return out;
}

void HeatReferenceBank::ensure_all() {
  for (double mu : config_.mus) ensure(mu);
}

void HeatReferenceBank::ensure(double mu) {
  const auto errors = error_targets();
  const auto samples = measurement_targets();
  bool complete = true;
  for (const auto& t : errors) {
    complete = complete && store_.contains(key("sensitivity", mu, t)) && store_.contains(key("adjoint", mu, t));
  }
  for (const auto& t : samples) complete = complete && store_.contains(key("measurement", mu, t));
  if (complete) return;
  if (progress_) progress_("heat reference for mu = " + std::to_string(mu));

  const HeatDiscretization ref(config_.reference_subdivisions, HeatSource::manufactured());
  const TimeGrid ref_grid{config_.final_time, config_.reference_steps};
  ReferenceCompressor compressor(ref.mesh(), ref_grid, ref.ops().stiffness, 1, errors);
  ReferenceSampler sampler(ref.mesh(), ref_grid, 1, samples);
  march_fine(ref, mu, ref_grid, [&](int n, const Vector& u, const Vector& psi) {
    compressor.observe(n, psi);
    sampler.observe(n, u);
  });
  const auto compressed = compressor.finish();
  auto sampled = sampler.finish();
  const nlohmann::json meta{{"mu", mu}, {"problem", "heat"}};
  for (size_t k = 0; k < errors.size(); ++k) {
    store_.save(encode_compressed(key("sensitivity", mu, errors[k]), compressed[k], meta));
  }
  for (size_t k = 0; k < samples.size(); ++k) {
    store_.save(encode_trajectory(key("measurement", mu, samples[k]), sampled[k], meta));
  }

  // Adjoint reference: clean measurements, finer than every solver grid.
  const TargetSpec adj_target{config_.adjoint_reference_subdivisions, config_.adjoint_reference_steps};
  const auto it = std::find(samples.begin(), samples.end(), adj_target);
  const Trajectory& adj_meas = sampled[it - samples.begin()];
  const HeatDiscretization adj(adj_target.subdivisions, HeatSource::manufactured());
  const TimeGrid adj_grid{config_.final_time, adj_target.steps};
  const Trajectory state = solve_state_fine(adj, mu, adj_grid);
  const Trajectory chi = solve_adjoint_fine(adj, mu, state, adj_meas);
  ReferenceCompressor adj_compressor(adj.mesh(), adj_grid, adj.ops().stiffness, 1, errors);
  for (int n = 0; n < chi.levels(); ++n) adj_compressor.observe(n, chi.fields[n]);
  const auto adj_compressed = adj_compressor.finish();
  for (size_t k = 0; k < errors.size(); ++k) {
    store_.save(encode_compressed(key("adjoint", mu, errors[k]), adj_compressed[k], meta));
  }
}

CompressedReference HeatReferenceBank::sensitivity(double mu, const TargetSpec& target) const {
  return decode_compressed(store_.load(key("sensitivity", mu, target)));
}

CompressedReference HeatReferenceBank::adjoint(double mu, const TargetSpec& target) const {
  return decode_compressed(store_.load(key("adjoint", mu, target)));
}

Trajectory HeatReferenceBank::measurements(double mu, const TargetSpec& target, bool noisy) const {
  Trajectory clean = decode_trajectory(store_.load(key("measurement", mu, target)));
  if (!noisy || config_.noise_sigma == 0.0) return clean;
  // Noise lives on the reference nodes at the sampled reference level, then
  // goes through the same restriction as the clean field.
  const Mesh target_mesh = build_structured_mesh(target.subdivisions);
  const SpMat restriction = interpolation_matrix(reference_mesh_, target_mesh);
  const TimeGrid ref_grid{config_.final_time, config_.reference_steps};
  const auto levels = ReferenceSampler::nearest_levels(ref_grid, clean.grid);
  const int id = static_cast<int>(std::lround(mu * 1000.0));
  for (int k = 0; k < clean.levels(); ++k) {
    clean.fields[k] += restriction * measurement_noise(reference_mesh_.node_count(), config_.noise_sigma,
                                                       config_.seed, id, levels[k]);
  }
  return clean;
}

namespace {

std::vector<Vector> as_parameters(const std::vector<double>& mus) {
  std::vector<Vector> out;
  for (double mu : mus) out.push_back(Vector::Constant(1, mu));
  return out;
}

TimeGrid fine_grid(const GridPair& p, double T) { return TimeGrid{T, p.fine_steps}; }
TimeGrid coarse_grid(const GridPair& p, double T) { return TimeGrid{T, p.coarse_steps}; }

bool is_held_out(const std::vector<int>& held_out, size_t k) {
  return held_out.empty() || std::find(held_out.begin(), held_out.end(), static_cast<int>(k)) != held_out.end();
}

}  // namespace

DirectTableRow heat_direct_row(const HeatReferenceBank& bank, const GridPair& pair, std::vector<int> held_out) {
  const HeatStudyConfig& cfg = bank.config();
  const HeatTwoGrid problem(pair.fine_subdivisions, pair.coarse_subdivisions, fine_grid(pair, cfg.final_time),
                            coarse_grid(pair, cfg.final_time));
  const auto snaps = generate_snapshots(problem, as_parameters(cfg.mus));
  // only held-out cases are compared against the reference
  std::vector<CompressedReference> fine_refs(cfg.mus.size()), coarse_refs(cfg.mus.size());
  for (size_t k = 0; k < cfg.mus.size(); ++k) {
    if (!is_held_out(held_out, k)) continue;
    fine_refs[k] = bank.sensitivity(cfg.mus[k], pair.fine_target());
    coarse_refs[k] = bank.sensitivity(cfg.mus[k], pair.coarse_target());
  }
  std::vector<LooCase> cases;
  for (size_t k = 0; k < snaps.size(); ++k) {
    LooCase c;
    c.parameter = snaps[k].parameter;
    c.fine_state = &snaps[k].fine_state;
    c.coarse_state = &snaps[k].coarse_state;
    c.fine = {&snaps[k].fine_sensitivities[0]};
    c.coarse = {&snaps[k].coarse_sensitivities[0]};
    c.fine_reference = {&fine_refs[k]};
    c.coarse_reference = {&coarse_refs[k]};
    cases.push_back(std::move(c));
  }
  LooOptions opts;
  opts.reduction = {cfg.direct_modes, 0.0, cfg.delta};
  opts.state_modes = cfg.direct_modes;
  opts.with_gp = true;
  opts.gp = cfg.gp;
  opts.relative = true;
  opts.held_out = std::move(held_out);
  DirectTableRow row;
  row.pair = pair;
  row.per_parameter = leave_one_out(cases, problem.space(), opts);
  for (const LooRow& r : row.per_parameter) {
    row.plain = std::max(row.plain, r.plain);
    row.rectified = std::max(row.rectified, r.rectified);
    row.gp = std::max(row.gp, r.gp);
    row.true_projection = std::max(row.true_projection, r.true_projection);
    row.coarse = std::max(row.coarse, r.coarse);
    row.fine = std::max(row.fine, r.fine);
  }
  return row;
}

AdjointTableRow heat_adjoint_row(const HeatReferenceBank& bank, const GridPair& pair, bool noisy,
                                 std::vector<int> held_out) {
  const HeatStudyConfig& cfg = bank.config();
  const HeatTwoGrid problem(pair.fine_subdivisions, pair.coarse_subdivisions, fine_grid(pair, cfg.final_time),
                            coarse_grid(pair, cfg.final_time));
  const MeasurementProvider provider = [&](const Vector& mu, bool fine) {
    return bank.measurements(mu[0], fine ? pair.fine_target() : pair.coarse_target(), noisy);
  };
  const auto snaps = generate_adjoint_snapshots(problem, as_parameters(cfg.mus), provider);
  std::vector<CompressedReference> fine_refs(cfg.mus.size()), coarse_refs(cfg.mus.size());
  for (size_t k = 0; k < cfg.mus.size(); ++k) {
    if (!is_held_out(held_out, k)) continue;
    fine_refs[k] = bank.adjoint(cfg.mus[k], pair.fine_target());
    coarse_refs[k] = bank.adjoint(cfg.mus[k], pair.coarse_target());
  }
  std::vector<LooCase> cases;
  for (size_t k = 0; k < snaps.size(); ++k) {
    LooCase c;
    c.parameter = snaps[k].parameter;
    c.fine_state = &snaps[k].fine_state;
    c.coarse_state = &snaps[k].coarse_state;
    c.fine = {&snaps[k].fine_adjoint};
    c.coarse = {&snaps[k].coarse_adjoint};
    c.fine_reference = {&fine_refs[k]};
    c.coarse_reference = {&coarse_refs[k]};
    cases.push_back(std::move(c));
  }
  LooOptions opts;
  opts.reduction = {cfg.adjoint_modes, 0.0, noisy ? cfg.noisy_adjoint_delta : cfg.adjoint_delta};
  opts.with_gp = false;
  opts.relative = false;
  opts.held_out = held_out;
  AdjointTableRow row;
  row.pair = pair;
  row.per_parameter = leave_one_out(cases, problem.space(), opts);
  for (const LooRow& r : row.per_parameter) {
    row.rectified = std::max(row.rectified, r.rectified);
    row.fine = std::max(row.fine, r.fine);
    row.true_projection = std::max(row.true_projection, r.true_projection);
    row.coarse = std::max(row.coarse, r.coarse);
  }

  // Objective gradients: fine adjoint vs the two-reduction NIRB adjoint.
  if (held_out.empty()) {
    for (int i = 0; i < static_cast<int>(snaps.size()); ++i) held_out.push_back(i);
  }
  for (int i : held_out) {
    std::vector<AdjointSnapshots> train;
    for (int k = 0; k < static_cast<int>(snaps.size()); ++k) {
      if (k != i) train.push_back(snaps[k]);
    }
    const AdjointArtifacts art = offline_adjoint(problem, train, opts.reduction);
    const Vector& mu = snaps[i].parameter;
    const AdjointResult nirb = online_adjoint(problem, mu, art, provider);
    const Vector hf = problem.gradient(mu, snaps[i].fine_state, snaps[i].fine_adjoint, provider(mu, true));
    row.gradients.push_back({mu[0], hf[0], nirb.gradient[0]});
  }
  return row;
}

std::vector<ConvergenceRow> heat_convergence(const HeatReferenceBank& bank) {
  const HeatStudyConfig& cfg = bank.config();
  int index = -1;
  for (int i = 0; i < static_cast<int>(cfg.mus.size()); ++i) {
    if (std::abs(cfg.mus[i] - cfg.convergence_mu) < 1e-12) index = i;
  }
  if (index < 0) throw ConfigError("convergence parameter is not in the parameter list");
  std::vector<ConvergenceRow> out;
  for (const GridPair& pair : cfg.pairs) {
    const DirectTableRow row = heat_direct_row(bank, pair, {index});
    const LooRow& r = row.per_parameter.front();
    out.push_back({pair, r.fine, r.coarse, r.plain, r.rectified, r.gp});
  }
  return out;
}

std::vector<CoarseOrderRow> coarse_state_order(const std::vector<double>& sizes, double final_time) {
  std::vector<CoarseOrderRow> out;
  for (double s : sizes) {
    CoarseOrderRow row;
    row.size = s;
    row.subdivisions = subdivisions_for_size(s);
    row.steps = TimeGrid::with_step(final_time, s).steps;
    const HeatDiscretization disc(row.subdivisions, HeatSource::manufactured());
    const Trajectory u = solve_state_coarse(disc, 1.0, TimeGrid{final_time, row.steps});
    row.error = l2_error_against(disc.mesh(), u.fields.back(),
                                 [final_time](double x, double y) { return manufactured_solution(x, y, final_time); });
    out.push_back(row);
  }
  return out;
}

double fitted_slope(const std::vector<double>& sizes, const std::vector<double>& errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) throw InvalidArgument("slope: need at least two points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(sizes.size());
  for (size_t i = 0; i < sizes.size(); ++i) {
    mx += std::log(sizes[i]) / n;
    my += std::log(errors[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const double dx = std::log(sizes[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace nirb
