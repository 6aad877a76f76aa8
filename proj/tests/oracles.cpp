#include "oracles.hpp"

#include "nirb/adjoint.hpp"
#include "nirb/brusselator.hpp"
#include "nirb/gpr.hpp"
#include "nirb/heat.hpp"
#include "nirb/rectification.hpp"
#include "nirb/reduced_basis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace nirb;

namespace oracles {

namespace {

double trajectory_mismatch(const Trajectory& exact, const Trajectory& approx, const SpMat& gram) {
  double err = 0.0, norm = 0.0;
  for (int n = 0; n < exact.levels(); ++n) {
    const Vector d = exact.fields[n] - approx.fields[n];
    err = std::max(err, std::sqrt(d.dot(gram * d)));
    norm = std::max(norm, std::sqrt(exact.fields[n].dot(gram * exact.fields[n])));
  }
  return err / norm;
}

Trajectory central_difference(const Trajectory& plus, const Trajectory& minus, double eps) {
  Trajectory out = plus;
  for (int n = 0; n < out.levels(); ++n) out.fields[n] = (plus.fields[n] - minus.fields[n]) / (2.0 * eps);
  return out;
}

}  // namespace

double heat_sensitivity_fd(bool coarse_scheme) {
  const HeatDiscretization disc(8, HeatSource::manufactured());
  const TimeGrid grid{1.0, 8};
  const double mu = 1.7, eps = 1e-3;
  auto solve = [&](double m) { return coarse_scheme ? solve_coarse_pair(disc, m, grid) : solve_fine_pair(disc, m, grid); };
  const auto base = solve(mu);
  const Trajectory fd = central_difference(solve(mu + eps).state, solve(mu - eps).state, eps);
  return trajectory_mismatch(fd, base.sensitivity, disc.ops().stiffness);
}

double heat_gradient_fd() {
  const HeatDiscretization disc(8, HeatSource::manufactured());
  const TimeGrid grid{1.0, 10};
  const double mu = 1.3, eps = 1e-3;
  Trajectory meas = solve_state_fine(disc, 2.1, grid);
  for (int n = 0; n < meas.levels(); ++n) meas.fields[n] += measurement_noise(disc.size(), 0.01, 7, 0, n);
  const Trajectory u = solve_state_fine(disc, mu, grid);
  const Trajectory chi = solve_adjoint_fine(disc, mu, u, meas);
  const double g = gradient_objective(disc.ops(), mu, u, chi, meas);
  const double fd = (objective(solve_state_fine(disc, mu + eps, grid), meas, disc.ops()) -
                     objective(solve_state_fine(disc, mu - eps, grid), meas, disc.ops())) /
                    (2.0 * eps);
  return std::abs(g - fd) / std::abs(fd);
}

double brusselator_tangent_fd() {
  const BrusselatorSystem sys(6);
  const TimeGrid grid{0.5, 10};
  const BrusselatorParams p{3.0, 2.5, 0.01};
  const std::vector<BrusselatorParameter> all{BrusselatorParameter::a, BrusselatorParameter::b,
                                              BrusselatorParameter::alpha};
  double worst = 0.0;
  for (auto scheme : {TimeScheme::euler_fine, TimeScheme::cn_coarse}) {
    const Trajectory u = solve_brusselator(sys, p, grid, scheme);
    const auto tangents = solve_brusselator_tangents(sys, p, u, all, scheme);
    for (size_t k = 0; k < all.size(); ++k) {
      const double v = parameter_value(p, all[k]);
      const double eps = 1e-4 * v;
      const Trajectory plus = solve_brusselator(sys, with_parameter(p, all[k], v + eps), grid, scheme);
      const Trajectory minus = solve_brusselator(sys, with_parameter(p, all[k], v - eps), grid, scheme);
      const Trajectory fd = central_difference(plus, minus, eps);
      // level 0 is zero for both, compare from level 1 on
      Trajectory a = fd, b = tangents[k];
      a.fields.erase(a.fields.begin());
      b.fields.erase(b.fields.begin());
      worst = std::max(worst, trajectory_mismatch(a, b, block_diagonal(SpMat(sys.ops().mass + sys.ops().stiffness), 2)));
    }
  }
  return worst;
}

double brusselator_gradient_fd() {
  const BrusselatorSystem sys(6);
  const TimeGrid grid{0.5, 10};
  const BrusselatorParams p{3.0, 2.5, 0.01};
  const Trajectory meas = solve_brusselator(sys, {3.2, 2.2, 0.02}, grid, TimeScheme::euler_fine);
  const Trajectory u = solve_brusselator(sys, p, grid, TimeScheme::euler_fine);
  const Trajectory chi = solve_brusselator_adjoint(sys, p, u, meas, TimeScheme::euler_fine);
  double worst = 0.0;
  for (auto which : {BrusselatorParameter::a, BrusselatorParameter::b, BrusselatorParameter::alpha}) {
    const double v = parameter_value(p, which);
    const double eps = 1e-4 * v;
    const double fp = brusselator_objective(
        sys, solve_brusselator(sys, with_parameter(p, which, v + eps), grid, TimeScheme::euler_fine), meas);
    const double fm = brusselator_objective(
        sys, solve_brusselator(sys, with_parameter(p, which, v - eps), grid, TimeScheme::euler_fine), meas);
    const double fd = (fp - fm) / (2.0 * eps);
    const double g = brusselator_gradient(sys, which, u, chi);
    worst = std::max(worst, std::abs(g - fd) / std::abs(fd));
  }
  return worst;
}

double gp_interpolation() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix x(12, 2), y(12, 3);
  for (int i = 0; i < 12; ++i) {
    x(i, 0) = unif(rng);
    x(i, 1) = unif(rng);
    y(i, 0) = std::sin(2.0 * x(i, 0)) + x(i, 1);
    y(i, 1) = x(i, 0) * x(i, 1);
    y(i, 2) = std::cos(x(i, 1));
  }
  GprOptions o;
  o.noise_variance = 1e-10;
  o.squared_distance = true;
  const GprModel m = GprModel::fit(x, y, o);
  double err = 0.0;
  for (int i = 0; i < 12; ++i) err = std::max(err, (m.predict(x.row(i).transpose()).mean - y.row(i).transpose()).cwiseAbs().maxCoeff());
  return err / y.cwiseAbs().maxCoeff();
}

double rectification_identity() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Matrix> tables;
  for (int level = 0; level < 4; ++level) tables.push_back(Matrix::NullaryExpr(8, 5, [&] { return g(rng); }));
  const RectificationSet r = build_rectification(tables, tables, 1e-12);
  double err = 0.0;
  for (const auto& m : r.matrices) err = std::max(err, (m - Matrix::Identity(5, 5)).norm());
  return err;
}

double rectification_tikhonov_limit() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const Matrix a = Matrix::NullaryExpr(8, 5, [&] { return g(rng); });
  const Matrix b = Matrix::NullaryExpr(8, 5, [&] { return g(rng); });
  const double delta = 1e8;
  const RectificationSet r = build_rectification({a}, {b}, delta);
  const Matrix limit = (a.transpose() * b).transpose();
  return (delta * r.matrices[0] - limit).norm() / limit.norm();
}

double quadratic_interpolation() {
  const TimeGrid coarse{2.0, 5}, fine{2.0, 23};
  auto field = [](double t) {
    Vector v(3);
    v << 1.0 + 2.0 * t - 0.5 * t * t, -3.0 * t * t, 4.0;
    return v;
  };
  Trajectory c(coarse, 3);
  for (int m = 0; m <= coarse.steps; ++m) c.fields[m] = field(coarse.time(m));
  const Trajectory f = quadratic_time_interpolate(c, fine);
  double err = 0.0;
  for (int n = 0; n <= fine.steps; ++n) err = std::max(err, (f.fields[n] - field(fine.time(n))).cwiseAbs().maxCoeff());
  return err;
}

double basis_orthogonality() {
  const HeatDiscretization disc(10, HeatSource::manufactured());
  const TimeGrid grid{1.0, 10};
  std::vector<Trajectory> sens;
  for (double mu : {0.5, 1.0, 2.0, 4.0}) sens.push_back(solve_fine_pair(disc, mu, grid).sensitivity);
  std::vector<const Trajectory*> ptr;
  for (const auto& s : sens) ptr.push_back(&s);
  const ReducedBasis b =
      h1_orthogonalize(greedy_select(ptr, disc.ops().mass, {0.0, 8}), disc.ops().stiffness);
  const Matrix mm = b.modes.transpose() * (disc.ops().mass * b.modes);
  const Matrix kk = b.modes.transpose() * (disc.ops().stiffness * b.modes);
  double off = 0.0;
  for (int i = 0; i < kk.rows(); ++i) {
    for (int j = 0; j < kk.cols(); ++j) {
      if (i != j) off = std::max(off, std::abs(kk(i, j)) / std::sqrt(kk(i, i) * kk(j, j)));
    }
  }
  return std::max((mm - Matrix::Identity(mm.rows(), mm.cols())).cwiseAbs().maxCoeff(), off);
}

}  // namespace oracles
