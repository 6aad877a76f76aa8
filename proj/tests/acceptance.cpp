// Acceptance run: one PASS/FAIL line per criterion AC1..AC9.
// Usage: acceptance [store-directory]
#include "nirb/brusselator_study.hpp"
#include "nirb/heat_study.hpp"
#include "nirb/instrumentation.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace nirb;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string failed;  // names of the failed checks
};

int failures = 0;

void report(const char* id, const char* what, const Outcome& o, double seconds) {
  std::printf("%s %s  %s  [%s]%s%s (%.0f s)\n", id, o.pass ? "PASS" : "FAIL", what, o.detail.c_str(),
              o.failed.empty() ? "" : " failed: ", o.failed.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

template <class F>
void run(const char* id, const char* what, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  report(id, what, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool within_factor(double value, double target, double factor) {
  return value <= factor * target && value >= target / factor;
}

void check(Outcome& o, bool ok, const std::string& msg) {
  if (!ok) {
    o.pass = false;
    o.failed += (o.failed.empty() ? "" : "; ") + msg;
  }
}

// tabulated targets, h-H: plain, rectified, GP, true projection, coarse
struct DirectTarget {
  const char* pair;
  double plain, rect, gp, tp, coarse;
};
const DirectTarget direct_targets[] = {
    {"0.01-0.1", 3.79e-2, 1.71e-2, 1.71e-2, 1.69e-2, 1.56e-1},
    {"0.02-0.1414", 8.24e-2, 3.49e-2, 3.39e-2, 3.38e-2, 2.32e-1},
    {"0.05-0.22", 1.38e-1, 7.89e-2, 7.89e-2, 7.89e-2, 3.24e-1},
    {"0.1-0.32", 2.99e-1, 1.58e-1, 1.57e-1, 1.57e-1, 4.38e-1},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string store_dir = argc > 1 ? argv[1] : "acceptance-store";
  SnapshotStore store(store_dir);
  const HeatStudyConfig heat = default_heat_config();
  const auto progress = [](const std::string& m) { std::fprintf(stderr, "  .. %s\n", m.c_str()); };
  HeatReferenceBank bank(store, heat, progress);

  run("AC1", "fine FEM sensitivity slope 1.0 +- 0.25, mu = 1", [&] {
    bank.ensure(heat.convergence_mu);
    std::vector<double> h, e;
    Outcome o;
    for (const auto& r : heat_convergence(bank)) {
      h.push_back(r.pair.fine_size);
      e.push_back(r.fine);
      o.detail += "h=" + fmt("%g", r.pair.fine_size) + ":" + fmt("%.3g", r.fine) + " ";
    }
    const double s = fitted_slope(h, e);
    o.detail += "slope " + fmt("%.3f", s);
    check(o, std::abs(s - 1.0) <= 0.25, "slope out of range");
    return o;
  });

  run("AC2", "coarse Crank-Nicolson L2(T) slope 2.0 +- 0.3", [&] {
    std::vector<double> H, e;
    Outcome o;
    for (const auto& r : coarse_state_order({0.32, 0.22, 0.14, 0.1})) {
      H.push_back(r.size);
      e.push_back(r.error);
      o.detail += "H=" + fmt("%g", r.size) + ":" + fmt("%.3g", r.error) + " ";
    }
    const double s = fitted_slope(H, e);
    o.detail += "slope " + fmt("%.3f", s);
    check(o, std::abs(s - 2.0) <= 0.3, "slope out of range");
    return o;
  });

  std::vector<DirectTableRow> direct;
  run("AC3", "direct table within factor 2, coarse >= plain >= rect, rect~tp 25%, GP~rect 50%", [&] {
    bank.ensure_all();
    Outcome o;
    for (size_t i = 0; i < heat.pairs.size(); ++i) {
      const DirectTableRow r = heat_direct_row(bank, heat.pairs[i]);
      direct.push_back(r);
      const DirectTarget& t = direct_targets[i];
      const std::string l = heat.pairs[i].label();
      o.detail += l + ": " + fmt("%.3g", r.plain) + " " + fmt("%.3g", r.rectified) + " " + fmt("%.3g", r.gp) + " " +
                  fmt("%.3g", r.true_projection) + " " + fmt("%.3g", r.coarse) + " | ";
      check(o, l == t.pair, "unexpected pair " + l);
      check(o, within_factor(r.plain, t.plain, 2.0), l + " plain");
      check(o, within_factor(r.rectified, t.rect, 2.0), l + " rectified");
      check(o, within_factor(r.gp, t.gp, 2.0), l + " gp");
      check(o, within_factor(r.true_projection, t.tp, 2.0), l + " true projection");
      check(o, within_factor(r.coarse, t.coarse, 2.0), l + " coarse");
      check(o, r.coarse >= r.plain && r.plain >= r.rectified, l + " ordering");
      check(o, std::abs(r.rectified - r.true_projection) <= 0.25 * r.true_projection, l + " rect vs tp");
      check(o, std::abs(r.gp - r.rectified) <= 0.5 * r.rectified, l + " gp vs rect");
    }
    return o;
  });

  run("AC4", "coarse / rectified >= 5 at 0.01-0.1", [&] {
    if (direct.empty()) return Outcome{false, "direct table unavailable"};
    const double ratio = direct.front().coarse / direct.front().rectified;
    return Outcome{ratio >= 5.0, "ratio " + fmt("%.2f", ratio)};
  });

  run("AC5", "adjoint rectified within 3x of fine (clean, noisy); clean coarse >= 5x rect at 0.01-0.1", [&] {
    bank.ensure_all();
    Outcome o;
    for (int noisy = 0; noisy < 2; ++noisy) {
      for (size_t i = 0; i < heat.pairs.size(); ++i) {
        const AdjointTableRow r = heat_adjoint_row(bank, heat.pairs[i], noisy != 0);
        const std::string l = std::string(noisy ? "noisy " : "clean ") + heat.pairs[i].label();
        o.detail += l + ": " + fmt("%.2e", r.rectified) + " " + fmt("%.2e", r.fine) + " " +
                    fmt("%.2e", r.true_projection) + " " + fmt("%.2e", r.coarse) + " | ";
        check(o, within_factor(r.rectified, r.fine, 3.0), l + " rect vs fine");
        if (!noisy && i == 0) check(o, r.coarse >= 5.0 * r.rectified, l + " coarse vs rect");
      }
    }
    return o;
  });

  run("AC6", "online GP runs exactly one coarse solve, P = 1 and P = 3", [&] {
    Outcome o;
    {
      const HeatTwoGrid problem(14, 4, {1.0, 10}, {1.0, 4});
      std::vector<Vector> mus;
      for (double mu : {0.5, 1.0, 2.0, 3.0}) mus.push_back(Vector::Constant(1, mu));
      OfflineOptions opt;
      opt.reduction.modes = 2;
      opt.state_modes = 2;
      opt.gp.kind = KernelKind::dot_product;
      const OfflineArtifacts art = offline_direct(problem, mus, opt);
      const long before = coarse_solve_count();
      const auto out = online_gp(problem, Vector::Constant(1, 1.5), art);
      const long n = coarse_solve_count() - before;
      o.detail += "P=1: " + std::to_string(n) + " ";
      check(o, n == 1 && out.size() == 1, "P=1 count");
    }
    {
      const BrusselatorTwoGrid problem(8, 4, {0.5, 10}, {0.5, 5},
                                       {BrusselatorParameter::a, BrusselatorParameter::b, BrusselatorParameter::alpha});
      std::vector<Vector> params;
      for (double a : {2.8, 3.2}) {
        for (double b : {2.0, 3.0}) params.push_back(BrusselatorTwoGrid::pack({a, b, 0.01}));
      }
      OfflineOptions opt;
      opt.reduction.modes = 2;
      opt.state_modes = 2;
      opt.gp.kind = KernelKind::dot_product;
      const OfflineArtifacts art = offline_direct(problem, params, opt);
      const long before = coarse_solve_count();
      const auto out = online_gp(problem, BrusselatorTwoGrid::pack({3.0, 2.5, 0.01}), art);
      const long n = coarse_solve_count() - before;
      o.detail += "P=3: " + std::to_string(n);
      check(o, n == 1 && out.size() == 3, "P=3 count");
    }
    return o;
  });

  const BrusselatorStudyConfig bcfg = default_brusselator_config();
  std::vector<SnapshotPair> bsnaps;
  run("AC7", "Brusselator rectified = true projection within 5%, coarse / rect >= 3 (N=10, 12 params, T=2)", [&] {
    BrusselatorReferenceBank bbank(store, bcfg, progress);
    bsnaps = brusselator_snapshots(bcfg);
    const BrusselatorTables t = brusselator_tables(bbank, bsnaps);
    Outcome o;
    for (const auto& r : t.rows) {
      const std::string l = parameter_name(r.output) + " " + params_label(r.params);
      o.detail += l + ": tp " + fmt("%.3g", r.true_projection) + " rect " + fmt("%.3g", r.rectified) + " coarse " +
                  fmt("%.3g", r.coarse) + " | ";
      check(o, std::abs(r.rectified - r.true_projection) <= 0.05 * r.true_projection, l + " rect vs tp");
      check(o, r.coarse >= 3.0 * r.rectified, l + " coarse vs rect");
    }
    return o;
  });

  run("AC8", "coarse / fine Brusselator solve time <= 0.3 at h = 0.02, H = 0.1", [&] {
    BrusselatorStudyConfig c = bcfg;
    c.rows.resize(1);
    const BrusselatorTwoGrid problem(c.fine_subdivisions(), c.coarse_subdivisions(), c.fine_grid(), c.coarse_grid(),
                                     c.outputs);
    const Vector mu = BrusselatorTwoGrid::pack(c.rows.front());
    std::vector<double> fine, coarse;
    for (int r = 0; r < 3; ++r) {
      auto s = std::chrono::steady_clock::now();
      (void)problem.fine_solution(mu);
      fine.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count());
      s = std::chrono::steady_clock::now();
      (void)problem.coarse_solution(mu);
      coarse.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count());
    }
    std::sort(fine.begin(), fine.end());
    std::sort(coarse.begin(), coarse.end());
    const double ratio = coarse[1] / fine[1];
    return Outcome{ratio <= 0.3, "fine " + fmt("%.2f s", fine[1]) + " coarse " + fmt("%.3f s", coarse[1]) +
                                     " ratio " + fmt("%.4f", ratio)};
  });

  run("AC9", "oracle suites: FD, GP interpolation, rectification limits, quadratic exactness, orthogonality", [&] {
    Outcome o;
    const double hs = std::max(oracles::heat_sensitivity_fd(false), oracles::heat_sensitivity_fd(true));
    const double bt = oracles::brusselator_tangent_fd();
    const double hg = oracles::heat_gradient_fd();
    const double bg = oracles::brusselator_gradient_fd();
    const double gp = oracles::gp_interpolation();
    const double ri = oracles::rectification_identity();
    const double rt = oracles::rectification_tikhonov_limit();
    const double qi = oracles::quadratic_interpolation();
    const double bo = oracles::basis_orthogonality();
    o.detail = "heat FD " + fmt("%.1e", hs) + ", bruss tangent FD " + fmt("%.1e", bt) + ", heat grad FD " +
               fmt("%.1e", hg) + ", bruss grad FD " + fmt("%.1e", bg) + ", GP " + fmt("%.1e", gp) + ", R=I " +
               fmt("%.1e", ri) + ", Tikhonov " + fmt("%.1e", rt) + ", quadratic " + fmt("%.1e", qi) +
               ", orthogonality " + fmt("%.1e", bo);
    check(o, hs <= 0.01, "heat sensitivity FD");
    check(o, bt <= 0.01, "Brusselator tangent FD");
    check(o, hg <= 0.02 && bg <= 0.02, "adjoint gradient FD");
    check(o, gp <= 1e-3, "GP interpolation");
    check(o, ri <= 1e-8 && rt <= 1e-6, "rectification limits");
    check(o, qi <= 1e-12, "quadratic interpolation");
    check(o, bo <= 1e-8, "basis orthogonality");
    return o;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
