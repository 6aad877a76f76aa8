#include "nirb/experiments.hpp"

#include <cstdio>

namespace nirb {

namespace {

using Meta = std::vector<std::pair<std::string, std::string>>;

std::string mesh_spec(int subdivisions, int steps) {
  return std::to_string(subdivisions) + "x" + std::to_string(subdivisions) + " squares/" + std::to_string(steps) +
         " steps";
}

SnapshotStore open_store(const Config& c) { return SnapshotStore(c.get("store")); }

std::string grad_text(const Vector& g) {
  std::string out;
  for (int i = 0; i < g.size(); ++i) out += (i ? " " : "") + format_value(g[i]);
  return out;
}

Meta heat_meta(const Config& c, const std::string& command) {
  Meta m = provenance(c, command);
  const HeatStudyConfig h = heat_config_from(c);
  m.push_back({"mesh", "unit square, structured P1, one diagonal per square"});
  m.push_back({"reference", mesh_spec(h.reference_subdivisions, h.reference_steps)});
  m.push_back({"adjoint_reference", mesh_spec(h.adjoint_reference_subdivisions, h.adjoint_reference_steps)});
  for (const auto& p : h.pairs) {
    m.push_back({"pair " + p.label(), "fine " + mesh_spec(p.fine_subdivisions, p.fine_steps) + ", coarse " +
                                          mesh_spec(p.coarse_subdivisions, p.coarse_steps)});
  }
  m.push_back({"delta", c.get("heat.delta")});
  m.push_back({"adjoint_delta", c.get("heat.adjoint_delta")});
  m.push_back({"noisy_adjoint_delta", c.get("heat.noisy_adjoint_delta")});
  m.push_back({"sigma_y", c.get("heat.gp.noise_variance")});
  m.push_back({"kernel", c.get("heat.gp.kernel")});
  m.push_back({"noise_sigma", c.get("heat.noise_sigma")});
  m.push_back({"seed", c.get("heat.seed")});
  return m;
}

Meta brusselator_meta(const Config& c, const std::string& command) {
  Meta m = provenance(c, command);
  const BrusselatorStudyConfig b = brusselator_config_from(c);
  m.push_back({"mesh", "unit square, structured P1, one diagonal per square"});
  m.push_back({"reference", mesh_spec(b.reference_subdivisions, b.reference_steps)});
  m.push_back({"fine", mesh_spec(b.fine_subdivisions(), b.fine_grid().steps)});
  m.push_back({"coarse", mesh_spec(b.coarse_subdivisions(), b.coarse_grid().steps)});
  m.push_back({"delta", c.get("brusselator.delta")});
  m.push_back({"sigma_y", c.get("brusselator.gp.noise_variance")});
  m.push_back({"kernel", c.get("brusselator.gp.kernel")});
  m.push_back({"noise_sigma", c.get("brusselator.noise_sigma")});
  m.push_back({"seed", c.get("brusselator.seed")});
  return m;
}

}  // namespace

std::string format_value(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw InvalidArgument("csv: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string CsvTable::text() const {
  std::string out;
  for (const auto& [k, v] : metadata) out += "# " + k + ": " + v + "\n";
  for (size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

Meta provenance(const Config& c, const std::string& command) {
  return {{"command", command}, {"config_hash", c.hash()}};
}

std::vector<CsvTable> cmd_convergence(const Config& c, const Progress& progress) {
  const HeatStudyConfig h = heat_config_from(c);
  if (h.pairs.size() < 2) throw ConfigError("convergence: at least two grid pairs are needed for a slope");
  SnapshotStore store = open_store(c);
  HeatReferenceBank bank(store, h, progress);
  bank.ensure(h.convergence_mu);
  const auto rows = heat_convergence(bank);

  CsvTable conv{"convergence.csv", heat_meta(c, "convergence"), {"h", "H", "fine", "coarse", "plain", "rectified", "gp"}, {}};
  conv.metadata.push_back({"mu", c.get("heat.convergence_mu")});
  conv.metadata.push_back({"error", "relative max_n |.|_H1 of the mu-sensitivity"});
  std::vector<double> hs, Hs, fine, coarse, plain, rect, gp;
  for (const auto& r : rows) {
    conv.add_row({format_value(r.pair.fine_size), format_value(r.pair.coarse_size), format_value(r.fine),
                  format_value(r.coarse), format_value(r.plain), format_value(r.rectified), format_value(r.gp)});
    hs.push_back(r.pair.fine_size);
    Hs.push_back(r.pair.coarse_size);
    fine.push_back(r.fine);
    coarse.push_back(r.coarse);
    plain.push_back(r.plain);
    rect.push_back(r.rectified);
    gp.push_back(r.gp);
  }
  // slopes against h, the coarse column against H
  conv.add_row({"slope", "", format_value(fitted_slope(hs, fine)), format_value(fitted_slope(Hs, coarse)),
                format_value(fitted_slope(hs, plain)), format_value(fitted_slope(hs, rect)),
                format_value(fitted_slope(hs, gp))});

  const auto sizes = coarse_order_sizes(c);
  CsvTable order{"coarse_order.csv", provenance(c, "convergence"), {"H", "subdivisions", "steps", "l2_error_at_T"}, {}};
  order.metadata.push_back({"scheme", "Crank-Nicolson, dt = H, mu = 1"});
  std::vector<double> Hl, err;
  for (const auto& r : coarse_state_order(sizes, h.final_time)) {
    order.add_row({format_value(r.size), std::to_string(r.subdivisions), std::to_string(r.steps), format_value(r.error)});
    Hl.push_back(r.size);
    err.push_back(r.error);
  }
  order.add_row({"slope", "", "", format_value(fitted_slope(Hl, err))});
  return {conv, order};
}

std::vector<CsvTable> cmd_direct_tables(const Config& c, const Progress& progress) {
  const HeatStudyConfig h = heat_config_from(c);
  SnapshotStore store = open_store(c);
  HeatReferenceBank bank(store, h, progress);
  bank.ensure_all();
  CsvTable table{"direct_tables.csv", heat_meta(c, "direct-tables"),
                 {"pair", "plain", "rectified", "gp", "true_projection", "coarse", "fine"}, {}};
  table.metadata.push_back({"modes", c.get("heat.direct_modes")});
  table.metadata.push_back({"error", "max over held-out mu of relative max_n |.|_H1"});
  CsvTable per{"direct_per_parameter.csv", table.metadata,
               {"pair", "mu", "plain", "rectified", "gp", "true_projection", "coarse", "fine"}, {}};
  for (const auto& pair : h.pairs) {
    if (progress) progress("direct table row " + pair.label());
    const DirectTableRow r = heat_direct_row(bank, pair);
    table.add_row({pair.label(), format_value(r.plain), format_value(r.rectified), format_value(r.gp),
                   format_value(r.true_projection), format_value(r.coarse), format_value(r.fine)});
    for (const auto& p : r.per_parameter) {
      per.add_row({pair.label(), format_value(p.parameter[0]), format_value(p.plain), format_value(p.rectified),
                   format_value(p.gp), format_value(p.true_projection), format_value(p.coarse), format_value(p.fine)});
    }
  }
  return {table, per};
}

std::vector<CsvTable> cmd_adjoint_tables(const Config& c, const Progress& progress) {
  const HeatStudyConfig h = heat_config_from(c);
  SnapshotStore store = open_store(c);
  HeatReferenceBank bank(store, h, progress);
  bank.ensure_all();
  CsvTable table{"adjoint_tables.csv", heat_meta(c, "adjoint-tables"),
                 {"variant", "pair", "rectified", "fine", "true_projection", "coarse"}, {}};
  table.metadata.push_back({"modes", c.get("heat.adjoint_modes")});
  table.metadata.push_back({"error", "max over held-out mu of absolute max_n |.|_H1 of the adjoint"});
  CsvTable grads{"adjoint_gradients.csv", table.metadata, {"variant", "pair", "mu", "fine_gradient", "nirb_gradient"}, {}};
  for (int noisy = 0; noisy < 2; ++noisy) {
    const std::string variant = noisy ? "noisy" : "clean";
    for (const auto& pair : h.pairs) {
      if (progress) progress("adjoint table row " + variant + " " + pair.label());
      const AdjointTableRow r = heat_adjoint_row(bank, pair, noisy != 0);
      table.add_row({variant, pair.label(), format_value(r.rectified), format_value(r.fine),
                     format_value(r.true_projection), format_value(r.coarse)});
      for (const auto& g : r.gradients) {
        grads.add_row({variant, pair.label(), format_value(g[0]), format_value(g[1]), format_value(g[2])});
      }
    }
  }
  return {table, grads};
}

std::vector<CsvTable> cmd_brusselator(const Config& c, const Progress& progress) {
  const BrusselatorStudyConfig b = brusselator_config_from(c);
  SnapshotStore store = open_store(c);
  BrusselatorReferenceBank bank(store, b, progress);
  if (progress) progress("brusselator snapshots for " + std::to_string(b.training.size()) + " parameters");
  const auto snapshots = brusselator_snapshots(b);
  const BrusselatorTables t = brusselator_tables(bank, snapshots);
  const Meta meta = brusselator_meta(c, "brusselator");

  CsvTable table{"brusselator_tables.csv", meta,
                 {"output", "params", "fine", "coarse", "true_projection", "rectified", "gp", "plain"}, {}};
  table.metadata.push_back({"modes", c.get("brusselator.modes")});
  table.metadata.push_back({"error", "relative max_n |.|_H1 of the tangent, leave-one-out"});
  for (const auto& r : t.rows) {
    table.add_row({parameter_name(r.output), params_label(r.params), format_value(r.fine), format_value(r.coarse),
                   format_value(r.true_projection), format_value(r.rectified), format_value(r.gp),
                   format_value(r.plain)});
  }

  CsvTable lambda{"brusselator_lambda.csv", meta, {"output", "N", "sqrt_lambda"}, {}};
  for (size_t p = 0; p < t.sqrt_eigenvalues.size(); ++p) {
    for (int i = 0; i < t.sqrt_eigenvalues[p].size(); ++i) {
      lambda.add_row({parameter_name(b.outputs[p]), std::to_string(i + 1), format_value(t.sqrt_eigenvalues[p][i])});
    }
  }

  std::vector<CsvTable> out{table, lambda};
  if (c.boolean("brusselator.gradients")) {
    // needs a reference state for every training parameter
    if (progress) progress("brusselator objective gradients");
    CsvTable grads{"brusselator_gradients.csv", meta, {"params", "fine_dF", "nirb_dF"}, {}};
    grads.metadata.push_back({"components", "d/da d/db d/dalpha"});
    for (const auto& g : brusselator_gradients(bank)) {
      grads.add_row({params_label(g.params), grad_text(g.fine), grad_text(g.nirb)});
    }
    out.push_back(grads);
  }

  if (progress) progress("brusselator timings");
  const BrusselatorTimings tm = brusselator_timings(b, snapshots);
  CsvTable timings{"brusselator_timings.csv", meta, {"quantity", "seconds"}, {}};
  timings.metadata.push_back({"timing", "wall clock, median of " + c.get("brusselator.timing_repeats")});
  timings.add_row({"fine_solve", format_value(tm.fine_solve)});
  timings.add_row({"coarse_solve", format_value(tm.coarse_solve)});
  timings.add_row({"coarse_over_fine", format_value(tm.coarse_solve / tm.fine_solve)});
  timings.add_row({"offline", format_value(tm.offline)});
  timings.add_row({"online_rectified", format_value(tm.online_rectified)});
  timings.add_row({"online_gp", format_value(tm.online_gp)});
  out.push_back(timings);
  return out;
}

}  // namespace nirb
