#include "nirb/brusselator_study.hpp"

#include "nirb/adjoint.hpp"
#include "nirb/transfer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace nirb {

namespace {

std::vector<BrusselatorParams> tensor(const std::vector<double>& as, const std::vector<double>& bs,
                                      const std::vector<double>& alphas) {
  std::vector<BrusselatorParams> out;
  for (double alpha : alphas) {
    for (double a : as) {
      for (double b : bs) out.push_back({a, b, alpha});
    }
  }
  return out;
}

bool same_params(const BrusselatorParams& x, const BrusselatorParams& y) {
  return x.a == y.a && x.b == y.b && x.alpha == y.alpha;
}

int index_of(const std::vector<BrusselatorParams>& list, const BrusselatorParams& p) {
  for (int i = 0; i < static_cast<int>(list.size()); ++i) {
    if (same_params(list[i], p)) return i;
  }
  return -1;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

std::string params_label(const BrusselatorParams& p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g-%g-%g", p.a, p.b, p.alpha);
  return buf;
}

std::vector<Vector> parameter_vectors(const std::vector<BrusselatorParams>& params) {
  std::vector<Vector> out;
  for (const auto& p : params) out.push_back(BrusselatorTwoGrid::pack(p));
  return out;
}

BrusselatorStudyConfig default_brusselator_config() {
  BrusselatorStudyConfig c;
  c.training = tensor({3.0, 4.0}, {2.0, 3.0, 4.0}, {0.01, 0.0005});
  c.rows = {{3, 2, 0.01}, {3, 3, 0.01}, {3, 4, 0.01}, {4, 2, 0.0005}, {4, 3, 0.0005}, {4, 4, 0.0005}};
  c.gp.kind = KernelKind::dot_product;
  return c;
}

BrusselatorStudyConfig full_brusselator_config() {
  BrusselatorStudyConfig c = default_brusselator_config();
  c.final_time = 4.0;
  c.reference_subdivisions = subdivisions_for_size(0.005);
  c.reference_steps = 800;
  c.training = tensor({2.5, 3.0, 3.5, 4.0}, {2.0, 3.0, 4.0}, {0.0005, 0.01, 0.05});
  c.modes = 40;
  c.state_modes = 40;
  return c;
}

BrusselatorReferenceBank::BrusselatorReferenceBank(SnapshotStore& store, BrusselatorStudyConfig config,
                                                   Progress progress)
    : store_(store),
      config_(std::move(config)),
      progress_(std::move(progress)),
      reference_mesh_(build_structured_mesh(config_.reference_subdivisions)) {}

std::string BrusselatorReferenceBank::key(const BrusselatorParams& p, const std::string& role,
                                          const TargetSpec& target) const {
  char buf[200];
  std::snprintf(buf, sizeof buf, "bruss/T%g/ref%dx%d/h1semi/%s/%s/%dx%d", config_.final_time, config_.reference_subdivisions,
                config_.reference_steps, params_label(p).c_str(), role.c_str(), target.subdivisions, target.steps);
  return buf;
}

void BrusselatorReferenceBank::ensure(const BrusselatorParams& p) {
  const std::vector<TargetSpec> targets{config_.fine_target(), config_.coarse_target()};
  bool complete = true;
  for (const auto& t : targets) {
    complete = complete && store_.contains(key(p, "state", t));
    for (auto w : config_.outputs) complete = complete && store_.contains(key(p, "tangent-" + parameter_name(w), t));
  }
  if (complete) return;
  if (progress_) progress_("brusselator reference for " + params_label(p));

  const BrusselatorSystem sys(config_.reference_subdivisions);
  const TimeGrid grid{config_.final_time, config_.reference_steps};
  const SpMat& gram = sys.ops().stiffness;  // per component, H1 seminorm
  std::vector<ReferenceCompressor> compressors;
  for (size_t k = 0; k < config_.outputs.size(); ++k) {
    compressors.emplace_back(sys.mesh(), grid, gram, 2, targets);
  }
  ReferenceSampler sampler(sys.mesh(), grid, 2, targets);
  march_brusselator(sys, p, grid, TimeScheme::euler_fine, config_.outputs,
                    [&](int n, const Vector& u, const std::vector<Vector>& tangents) {
                      sampler.observe(n, u);
                      for (size_t k = 0; k < tangents.size(); ++k) compressors[k].observe(n, tangents[k]);
                    });
  const nlohmann::json meta{{"problem", "brusselator"}, {"a", p.a}, {"b", p.b}, {"alpha", p.alpha}};
  auto sampled = sampler.finish();
  for (size_t t = 0; t < targets.size(); ++t) store_.save(encode_trajectory(key(p, "state", targets[t]), sampled[t], meta));
  for (size_t k = 0; k < config_.outputs.size(); ++k) {
    auto compressed = compressors[k].finish();
    for (size_t t = 0; t < targets.size(); ++t) {
      store_.save(encode_compressed(key(p, "tangent-" + parameter_name(config_.outputs[k]), targets[t]),
                                    compressed[t], meta));
    }
  }
}

CompressedReference BrusselatorReferenceBank::tangent(const BrusselatorParams& p, BrusselatorParameter which,
                                                      const TargetSpec& target) const {
  return decode_compressed(store_.load(key(p, "tangent-" + parameter_name(which), target)));
}

Trajectory BrusselatorReferenceBank::measurements(const BrusselatorParams& p, const TargetSpec& target,
                                                  bool noisy) const {
  Trajectory clean = decode_trajectory(store_.load(key(p, "state", target)));
  if (!noisy || config_.noise_sigma == 0.0) return clean;
  const Mesh target_mesh = build_structured_mesh(target.subdivisions);
  const SpMat restriction = block_diagonal(interpolation_matrix(reference_mesh_, target_mesh), 2);
  const auto levels =
      ReferenceSampler::nearest_levels(TimeGrid{config_.final_time, config_.reference_steps}, clean.grid);
  const int id = std::max(0, index_of(config_.training, p));
  for (int k = 0; k < clean.levels(); ++k) {
    clean.fields[k] +=
        restriction * measurement_noise(2 * reference_mesh_.node_count(), config_.noise_sigma, config_.seed, id, levels[k]);
  }
  return clean;
}

std::vector<SnapshotPair> brusselator_snapshots(const BrusselatorStudyConfig& cfg) {
  const BrusselatorTwoGrid problem(cfg.fine_subdivisions(), cfg.coarse_subdivisions(), cfg.fine_grid(),
                                   cfg.coarse_grid(), cfg.outputs);
  return generate_snapshots(problem, parameter_vectors(cfg.training));
}

BrusselatorTables brusselator_tables(BrusselatorReferenceBank& bank, const std::vector<SnapshotPair>& snapshots) {
  const BrusselatorStudyConfig& cfg = bank.config();
  if (snapshots.size() != cfg.training.size()) throw InvalidArgument("brusselator: one snapshot per training parameter");
  const BrusselatorTwoGrid problem(cfg.fine_subdivisions(), cfg.coarse_subdivisions(), cfg.fine_grid(),
                                   cfg.coarse_grid(), cfg.outputs);
  std::vector<int> held;
  for (const auto& r : cfg.rows) {
    const int i = index_of(cfg.training, r);
    if (i < 0) throw ConfigError("brusselator: evaluated parameter " + params_label(r) + " is not a training parameter");
    held.push_back(i);
    bank.ensure(r);
  }
  // references for held-out cases only
  std::vector<std::vector<CompressedReference>> fine_refs(snapshots.size()), coarse_refs(snapshots.size());
  for (int i : held) {
    for (auto w : cfg.outputs) {
      fine_refs[i].push_back(bank.tangent(cfg.training[i], w, cfg.fine_target()));
      coarse_refs[i].push_back(bank.tangent(cfg.training[i], w, cfg.coarse_target()));
    }
  }
  std::vector<LooCase> cases;
  for (size_t k = 0; k < snapshots.size(); ++k) {
    LooCase c;
    c.parameter = snapshots[k].parameter;
    c.fine_state = &snapshots[k].fine_state;
    c.coarse_state = &snapshots[k].coarse_state;
    for (size_t p = 0; p < cfg.outputs.size(); ++p) {
      c.fine.push_back(&snapshots[k].fine_sensitivities[p]);
      c.coarse.push_back(&snapshots[k].coarse_sensitivities[p]);
    }
    for (const auto& r : fine_refs[k]) c.fine_reference.push_back(&r);
    for (const auto& r : coarse_refs[k]) c.coarse_reference.push_back(&r);
    cases.push_back(std::move(c));
  }
  LooOptions opts;
  opts.reduction = {cfg.modes, 0.0, cfg.delta};
  opts.state_modes = cfg.state_modes;
  opts.with_gp = true;
  opts.gp = cfg.gp;
  opts.relative = true;
  opts.held_out = held;
  BrusselatorTables out;
  for (const LooRow& r : leave_one_out(cases, problem.space(), opts)) {
    BrusselatorTableRow row;
    row.params = BrusselatorTwoGrid::unpack(r.parameter);
    row.output = cfg.outputs[r.output];
    row.fine = r.fine;
    row.coarse = r.coarse;
    row.true_projection = r.true_projection;
    row.rectified = r.rectified;
    row.gp = r.gp;
    row.plain = r.plain;
    out.rows.push_back(row);
  }
  for (size_t p = 0; p < cfg.outputs.size(); ++p) {
    std::vector<const Trajectory*> all;
    for (const auto& s : snapshots) all.push_back(&s.fine_sensitivities[p]);
    GreedyOptions g;
    g.max_modes = cfg.modes;
    const ReducedBasis basis = h1_orthogonalize(greedy_select(all, problem.space().mass, g), problem.space().stiffness);
    out.sqrt_eigenvalues.push_back(basis.eigenvalues.cwiseMax(0.0).cwiseSqrt());
  }
  return out;
}

std::vector<BrusselatorGradientRow> brusselator_gradients(BrusselatorReferenceBank& bank) {
  const BrusselatorStudyConfig& cfg = bank.config();
  const std::vector<BrusselatorParameter> all{BrusselatorParameter::a, BrusselatorParameter::b,
                                              BrusselatorParameter::alpha};
  const BrusselatorTwoGrid problem(cfg.fine_subdivisions(), cfg.coarse_subdivisions(), cfg.fine_grid(),
                                   cfg.coarse_grid(), all);
  for (const auto& p : cfg.training) bank.ensure(p);
  const MeasurementProvider provider = [&](const Vector& mu, bool fine) {
    return bank.measurements(BrusselatorTwoGrid::unpack(mu), fine ? cfg.fine_target() : cfg.coarse_target());
  };
  const auto snaps = generate_adjoint_snapshots(problem, parameter_vectors(cfg.training), provider);
  std::vector<BrusselatorGradientRow> out;
  for (const auto& r : cfg.rows) {
    const int i = index_of(cfg.training, r);
    if (i < 0) throw ConfigError("brusselator: evaluated parameter " + params_label(r) + " is not a training parameter");
    std::vector<AdjointSnapshots> train;
    for (int k = 0; k < static_cast<int>(snaps.size()); ++k) {
      if (k != i) train.push_back(snaps[k]);
    }
    const AdjointArtifacts art = offline_adjoint(problem, train, {cfg.modes, 0.0, cfg.delta});
    const Vector& mu = snaps[i].parameter;
    BrusselatorGradientRow row;
    row.params = r;
    row.fine = problem.gradient(mu, snaps[i].fine_state, snaps[i].fine_adjoint, provider(mu, true));
    row.nirb = online_adjoint(problem, mu, art, provider).gradient;
    out.push_back(row);
  }
  return out;
}

BrusselatorTimings brusselator_timings(const BrusselatorStudyConfig& cfg, const std::vector<SnapshotPair>& snapshots) {
  if (cfg.rows.empty()) throw ConfigError("brusselator: no evaluated parameters");
  const BrusselatorTwoGrid problem(cfg.fine_subdivisions(), cfg.coarse_subdivisions(), cfg.fine_grid(),
                                   cfg.coarse_grid(), cfg.outputs);
  const Vector mu = BrusselatorTwoGrid::pack(cfg.rows.front());
  const int repeats = std::max(1, cfg.timing_repeats);
  std::vector<double> fine, coarse, offline, rect, gp;
  OfflineOptions opts;
  opts.reduction = {cfg.modes, 0.0, cfg.delta};
  opts.state_modes = cfg.state_modes;
  opts.gp = cfg.gp;
  for (int r = 0; r < repeats; ++r) {
    auto start = std::chrono::steady_clock::now();
    (void)problem.fine_solution(mu);
    fine.push_back(seconds_since(start));
    start = std::chrono::steady_clock::now();
    (void)problem.coarse_solution(mu);
    coarse.push_back(seconds_since(start));
  }
  // Offline from stored snapshots: bases, rectification, GP.
  OfflineArtifacts art;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    art = offline_direct(problem, snapshots, opts);
    offline.push_back(seconds_since(start));
  }
  for (int r = 0; r < repeats; ++r) {
    double total = 0.0;
    for (int p = 0; p < problem.parameter_count(); ++p) total += online_rectified(problem, mu, art, p).seconds;
    rect.push_back(total);
    const auto start = std::chrono::steady_clock::now();
    (void)online_gp(problem, mu, art);
    gp.push_back(seconds_since(start));
  }
  return {median(fine), median(coarse), median(offline), median(rect), median(gp)};
}

}  // namespace nirb
