#include "nirb/brusselator.hpp"

#include "nirb/instrumentation.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nirb {

std::string parameter_name(BrusselatorParameter p) {
  switch (p) {
    case BrusselatorParameter::a: return "a";
    case BrusselatorParameter::b: return "b";
    case BrusselatorParameter::alpha: return "alpha";
  }
  return "?";
}

double parameter_value(const BrusselatorParams& params, BrusselatorParameter p) {
  switch (p) {
    case BrusselatorParameter::a: return params.a;
    case BrusselatorParameter::b: return params.b;
    case BrusselatorParameter::alpha: return params.alpha;
  }
  return 0.0;
}

BrusselatorParams with_parameter(BrusselatorParams params, BrusselatorParameter p, double value) {
  switch (p) {
    case BrusselatorParameter::a: params.a = value; break;
    case BrusselatorParameter::b: params.b = value; break;
    case BrusselatorParameter::alpha: params.alpha = value; break;
  }
  return params;
}

namespace {

// Position of entry (row, col) in the value array of a compressed column-major matrix.
int slot_of(const SpMat& m, int row, int col) {
  const int* inner = m.innerIndexPtr();
  const int begin = m.outerIndexPtr()[col];
  const int end = m.outerIndexPtr()[col + 1];
  const int* hit = std::lower_bound(inner + begin, inner + end, row);
  if (hit == inner + end || *hit != row) throw Error("brusselator: entry missing from sparsity pattern");
  return static_cast<int>(hit - inner);
}

}  // namespace

BrusselatorSystem::BrusselatorSystem(int subdivisions)
    : mesh_(build_structured_mesh(subdivisions)), ops_(assemble_operators(mesh_)), n_(mesh_.node_count()) {
  const SpMat& mass = ops_.mass;
  const int nnz = static_cast<int>(mass.nonZeros());
  mass_values_.assign(mass.valuePtr(), mass.valuePtr() + nnz);
  stiffness_values_.resize(nnz);
  std::vector<Triplet> block_entries;
  block_entries.reserve(4 * nnz);
  std::vector<std::array<int, 2>> slot_position(nnz);
  for (int col = 0; col < n_; ++col) {
    for (int k = mass.outerIndexPtr()[col]; k < mass.outerIndexPtr()[col + 1]; ++k) {
      const int row = mass.innerIndexPtr()[k];
      slot_position[k] = {row, col};
      stiffness_values_[k] = ops_.stiffness.coeff(row, col);
      for (int bi = 0; bi < 2; ++bi) {
        for (int bj = 0; bj < 2; ++bj) block_entries.emplace_back(row + bi * n_, col + bj * n_, 1.0);
      }
    }
  }
  pattern_.resize(2 * n_, 2 * n_);
  pattern_.setFromTriplets(block_entries.begin(), block_entries.end());
  pattern_.makeCompressed();
  block_slot_.resize(nnz);
  for (int k = 0; k < nnz; ++k) {
    const auto [row, col] = slot_position[k];
    block_slot_[k] = {slot_of(pattern_, row, col), slot_of(pattern_, row, col + n_), slot_of(pattern_, row + n_, col),
                      slot_of(pattern_, row + n_, col + n_)};
  }
  local_index_.resize(mesh_.triangles.size());
  for (int t = 0; t < mesh_.triangle_count(); ++t) {
    const auto& tri = mesh_.triangles[t];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) local_index_[t][3 * r + c] = slot_of(mass, tri[r], tri[c]);
    }
  }
  block_mass_ = block_diagonal(mass, 2);
  lumped_one_ = mass * Vector::Ones(n_);
}

void BrusselatorSystem::reaction(const Vector& u, Vector* values, std::vector<double>* d1,
                                 std::vector<double>* d2) const {
  const auto& rule = quadrature_barycentric();
  if (values) values->setZero(n_);
  if (d1) d1->assign(mass_values_.size(), 0.0);
  if (d2) d2->assign(mass_values_.size(), 0.0);
  for (int t = 0; t < mesh_.triangle_count(); ++t) {
    const auto& tri = mesh_.triangles[t];
    const double w = mesh_.signed_area(t) / 3.0;
    for (int q = 0; q < 3; ++q) {
      const auto& phi = rule[q];
      double u1 = 0.0;
      double u2 = 0.0;
      for (int k = 0; k < 3; ++k) {
        u1 += phi[k] * u[tri[k]];
        u2 += phi[k] * u[n_ + tri[k]];
      }
      if (values) {
        const double nq = w * u1 * u1 * u2;
        for (int r = 0; r < 3; ++r) (*values)[tri[r]] += nq * phi[r];
      }
      if (d1 || d2) {
        const double c1 = w * 2.0 * u1 * u2;
        const double c2 = w * u1 * u1;
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            const int s = local_index_[t][3 * r + c];
            const double pp = phi[r] * phi[c];
            if (d1) (*d1)[s] += c1 * pp;
            if (d2) (*d2)[s] += c2 * pp;
          }
        }
      }
    }
  }
}

Vector BrusselatorSystem::rhs(const BrusselatorParams& p, const Vector& u) const {
  if (u.size() != size()) throw InvalidArgument("brusselator: state size mismatch");
  Vector nonlinear;
  reaction(u, &nonlinear, nullptr, nullptr);
  const auto u1 = u.head(n_);
  const auto u2 = u.tail(n_);
  const Vector mu1 = ops_.mass * u1;
  Vector f(size());
  f.head(n_) = p.a * lumped_one_ + nonlinear - (p.b + 1.0) * mu1 - p.alpha * (ops_.stiffness * u1);
  f.tail(n_) = p.b * mu1 - nonlinear - p.alpha * (ops_.stiffness * u2);
  return f;
}

SpMat BrusselatorSystem::step_matrix(const BrusselatorParams& p, const Vector& u, double theta_dt) const {
  if (u.size() != size()) throw InvalidArgument("brusselator: state size mismatch");
  std::vector<double> d1;
  std::vector<double> d2;
  reaction(u, nullptr, &d1, &d2);
  SpMat s = pattern_;
  double* v = s.valuePtr();
  for (size_t k = 0; k < mass_values_.size(); ++k) {
    const double m = mass_values_[k];
    const double kk = stiffness_values_[k];
    const auto& slot = block_slot_[k];
    const double j00 = d1[k] - (p.b + 1.0) * m - p.alpha * kk;
    const double j01 = d2[k];
    const double j10 = p.b * m - d1[k];
    const double j11 = -d2[k] - p.alpha * kk;
    v[slot[0]] = m - theta_dt * j00;
    v[slot[1]] = -theta_dt * j01;
    v[slot[2]] = -theta_dt * j10;
    v[slot[3]] = m - theta_dt * j11;
  }
  return s;
}

SpMat BrusselatorSystem::jacobian(const BrusselatorParams& p, const Vector& u) const {
  // step_matrix(θΔt = -1) = M + J, so subtract the mass blocks back out.
  return SpMat(step_matrix(p, u, -1.0) - block_mass_);
}

Vector BrusselatorSystem::parameter_source(BrusselatorParameter which, const Vector& u) const {
  Vector s = Vector::Zero(size());
  switch (which) {
    case BrusselatorParameter::a:
      s.head(n_) = lumped_one_;
      break;
    case BrusselatorParameter::b: {
      const Vector mu1 = ops_.mass * u.head(n_);
      s.head(n_) = -mu1;
      s.tail(n_) = mu1;
      break;
    }
    case BrusselatorParameter::alpha:
      s.head(n_) = -(ops_.stiffness * u.head(n_));
      s.tail(n_) = -(ops_.stiffness * u.tail(n_));
      break;
  }
  return s;
}

Vector BrusselatorSystem::default_initial_state() const {
  Vector u(size());
  for (int i = 0; i < n_; ++i) {
    u[i] = 2.0 + 0.25 * mesh_.nodes[i].y;
    u[n_ + i] = 1.0 + 0.8 * mesh_.nodes[i].x;
  }
  return u;
}

Vector BrusselatorSystem::constant_state(double u1, double u2) const {
  Vector u(size());
  u.head(n_).setConstant(u1);
  u.tail(n_).setConstant(u2);
  return u;
}

namespace {

using LU = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

// Step matrices are mass dominated (αΔt/h² = O(1)), so above a few thousand
// unknowns Jacobi-preconditioned BiCGSTAB beats the sparse LU by far. LU is
// kept for small systems and as a fallback.
constexpr int direct_limit = 4000;

class StepSolver {
 public:
  explicit StepSolver(const BrusselatorSystem& sys) : direct_(sys.size() <= direct_limit) {
    if (direct_) lu_.analyzePattern(sys.pattern());
    iterative_.setTolerance(1e-13);
    iterative_.setMaxIterations(1000);
  }

  void compute(SpMat matrix, const char* what) {
    what_ = what;
    if (direct_) {
      lu_.factorize(matrix);
      if (lu_.info() != Eigen::Success) throw NumericalError(std::string("brusselator: singular ") + what + " matrix");
      return;
    }
    matrix_ = std::move(matrix);
    iterative_.compute(matrix_);
    fallback_ready_ = false;
  }

  Vector solve(const Vector& rhs, const Vector* guess = nullptr) {
    if (direct_) return lu_.solve(rhs);
    Vector x = guess ? Vector(iterative_.solveWithGuess(rhs, *guess)) : Vector(iterative_.solve(rhs));
    if (iterative_.info() == Eigen::Success) return x;
    if (!fallback_ready_) {
      fallback_.analyzePattern(matrix_);
      fallback_.factorize(matrix_);
      if (fallback_.info() != Eigen::Success) {
        throw NumericalError(std::string("brusselator: singular ") + what_ + " matrix");
      }
      fallback_ready_ = true;
    }
    return fallback_.solve(rhs);
  }

 private:
  bool direct_;
  LU lu_;
  SpMat matrix_;
  Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> iterative_;
  LU fallback_;
  bool fallback_ready_ = false;
  const char* what_ = "";
};

double theta_of(TimeScheme scheme) { return scheme == TimeScheme::euler_fine ? 1.0 : 0.5; }

}  // namespace

void march_brusselator(const BrusselatorSystem& sys, const BrusselatorParams& p, const TimeGrid& grid,
                       TimeScheme scheme, const std::vector<BrusselatorParameter>& which,
                       const BrusselatorObserver& observe, const NewtonOptions& newton, NewtonReport* report,
                       const Vector* initial) {
  if (scheme == TimeScheme::cn_coarse) count_coarse_solve();
  const double dt = grid.dt();
  const double theta = theta_of(scheme);
  const SpMat& mass = sys.block_mass();
  StepSolver solver(sys);
  NewtonReport local;
  auto refactor = [&](const Vector& at) {
    solver.compute(sys.step_matrix(p, at, theta * dt), "Newton");
    ++local.factorizations;
  };

  Vector u = initial ? *initial : sys.default_initial_state();
  if (u.size() != sys.size()) throw InvalidArgument("brusselator: initial state size mismatch");
  std::vector<Vector> tangents(which.size(), Vector::Zero(sys.size()));
  std::vector<Vector> sources(which.size());
  for (size_t k = 0; k < which.size(); ++k) sources[k] = sys.parameter_source(which[k], u);
  observe(0, u, tangents);
  for (int n = 1; n <= grid.steps; ++n) {
    Vector fixed = mass * u;
    if (theta < 1.0) fixed += (1.0 - theta) * dt * sys.rhs(p, u);
    SpMat explicit_part;
    if (theta < 1.0 && !which.empty()) explicit_part = sys.step_matrix(p, u, -(1.0 - theta) * dt);
    Vector v = u;
    bool converged = false;
    double residual_norm = 0.0;
    int it = 0;
    for (; it < newton.max_iterations; ++it) {
      const Vector g = mass * v - theta * dt * sys.rhs(p, v) - fixed;
      residual_norm = g.lpNorm<Eigen::Infinity>();
      refactor(v);
      const Vector delta = solver.solve(g);
      v -= delta;
      if (!v.allFinite()) break;
      const double step = delta.lpNorm<Eigen::Infinity>();
      if (step <= newton.tolerance * std::max(1.0, v.lpNorm<Eigen::Infinity>())) {
        converged = true;
        ++it;
        break;
      }
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "brusselator: Newton failed at step " << n << " (t = " << grid.time(n) << ") after " << it
          << " iterations, residual " << residual_norm << ", params (" << p.a << ", " << p.b << ", " << p.alpha
          << ")";
      throw NumericalError(msg.str());
    }
    local.max_iterations = std::max(local.max_iterations, it);
    local.total_iterations += it;
    local.worst_residual = std::max(local.worst_residual, residual_norm);
    u = std::move(v);
    if (!which.empty()) refactor(u);
    for (size_t k = 0; k < which.size(); ++k) {
      const Vector source = sys.parameter_source(which[k], u);
      Vector r;
      if (theta < 1.0) {
        r = explicit_part * tangents[k] + (0.5 * dt) * (source + sources[k]);
      } else {
        r = mass * tangents[k] + dt * source;
      }
      tangents[k] = solver.solve(r, &tangents[k]);
      sources[k] = source;
    }
    observe(n, u, tangents);
  }
  if (report) *report = local;
}

Trajectory solve_brusselator(const BrusselatorSystem& sys, const BrusselatorParams& p, const TimeGrid& grid,
                             TimeScheme scheme, const NewtonOptions& newton, NewtonReport* report,
                             const Vector* initial) {
  Trajectory out(grid, 0);
  march_brusselator(
      sys, p, grid, scheme, {}, [&](int n, const Vector& u, const std::vector<Vector>&) { out.fields[n] = u; },
      newton, report, initial);
  return out;
}

BrusselatorSolution solve_brusselator_with_tangents(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                                    const TimeGrid& grid, const std::vector<BrusselatorParameter>& which,
                                                    TimeScheme scheme, const NewtonOptions& newton,
                                                    NewtonReport* report) {
  BrusselatorSolution out{Trajectory(grid, 0), std::vector<Trajectory>(which.size(), Trajectory(grid, 0))};
  march_brusselator(
      sys, p, grid, scheme, which,
      [&](int n, const Vector& u, const std::vector<Vector>& t) {
        out.state.fields[n] = u;
        for (size_t k = 0; k < t.size(); ++k) out.tangents[k].fields[n] = t[k];
      },
      newton, report);
  return out;
}

std::vector<Trajectory> solve_brusselator_tangents(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                                   const Trajectory& state,
                                                   const std::vector<BrusselatorParameter>& which,
                                                   TimeScheme scheme) {
  if (state.field_size() != sys.size() || state.levels() < 2) {
    throw InvalidArgument("brusselator tangent: state does not match the system");
  }
  if (scheme == TimeScheme::cn_coarse) count_coarse_solve();
  const double dt = state.grid.dt();
  const double theta = theta_of(scheme);
  const SpMat& mass = sys.block_mass();
  StepSolver solver(sys);
  std::vector<Trajectory> out(which.size(), Trajectory(state.grid, sys.size()));
  std::vector<Vector> previous_source(which.size());
  for (size_t k = 0; k < which.size(); ++k) previous_source[k] = sys.parameter_source(which[k], state.fields[0]);
  SpMat previous_explicit;
  if (theta < 1.0) previous_explicit = sys.step_matrix(p, state.fields[0], -(1.0 - theta) * dt);
  for (int n = 1; n <= state.grid.steps; ++n) {
    solver.compute(sys.step_matrix(p, state.fields[n], theta * dt), "tangent");
    SpMat next_explicit;
    if (theta < 1.0) next_explicit = sys.step_matrix(p, state.fields[n], -(1.0 - theta) * dt);
    for (size_t k = 0; k < which.size(); ++k) {
      const Vector source = sys.parameter_source(which[k], state.fields[n]);
      Vector r;
      if (theta < 1.0) {
        r = previous_explicit * out[k].fields[n - 1] + (0.5 * dt) * (source + previous_source[k]);
      } else {
        r = mass * out[k].fields[n - 1] + dt * source;
      }
      out[k].fields[n] = solver.solve(r, &out[k].fields[n - 1]);
      previous_source[k] = source;
    }
    if (theta < 1.0) previous_explicit = std::move(next_explicit);
  }
  return out;
}

Trajectory solve_brusselator_adjoint(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                     const Trajectory& state, const Trajectory& measurements, TimeScheme scheme) {
  check_aligned(state, measurements, "brusselator adjoint");
  if (state.field_size() != sys.size()) throw InvalidArgument("brusselator adjoint: state does not match the system");
  if (scheme == TimeScheme::cn_coarse) count_coarse_solve();
  const double dt = state.grid.dt();
  const SpMat& mass = sys.block_mass();
  const int last = state.grid.steps;
  StepSolver solver(sys);
  Trajectory chi(state.grid, sys.size());
  for (int n = last - 1; n >= 0; --n) {
    const Vector e_next = state.fields[n + 1] - measurements.fields[n + 1];
    if (scheme == TimeScheme::euler_fine) {
      solver.compute(sys.step_matrix(p, state.fields[n + 1], dt).transpose(), "adjoint");
      chi.fields[n] = solver.solve(mass * (chi.fields[n + 1] + dt * e_next), &chi.fields[n + 1]);
    } else {
      const Vector e_here = state.fields[n] - measurements.fields[n];
      const SpMat explicit_part = sys.step_matrix(p, state.fields[n + 1], -0.5 * dt).transpose();
      solver.compute(sys.step_matrix(p, state.fields[n], 0.5 * dt).transpose(), "adjoint");
      chi.fields[n] = solver.solve(explicit_part * chi.fields[n + 1] + (0.5 * dt) * (mass * (e_next + e_here)),
                                   &chi.fields[n + 1]);
    }
  }
  return chi;
}

double brusselator_gradient(const BrusselatorSystem& sys, BrusselatorParameter which, const Trajectory& state,
                            const Trajectory& adjoint) {
  check_aligned(state, adjoint, "brusselator gradient");
  double g = 0.0;
  for (int n = 1; n < state.levels(); ++n) g += adjoint.fields[n - 1].dot(sys.parameter_source(which, state.fields[n]));
  return g;
}

double brusselator_objective(const BrusselatorSystem& sys, const Trajectory& state, const Trajectory& measurements) {
  check_aligned(state, measurements, "brusselator objective");
  double total = 0.0;
  for (int n = 0; n < state.levels(); ++n) {
    const Vector e = state.fields[n] - measurements.fields[n];
    total += e.dot(sys.block_mass() * e);
  }
  return 0.5 * total;
}

}  // namespace nirb
