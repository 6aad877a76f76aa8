#pragma once

#include "nirb/fem.hpp"

#include <array>
#include <functional>

namespace nirb {

/// Space-time source written as Σ_k θ_k(t) f_k(x). Each spatial part is
/// assembled once per mesh so a time step costs a few vector updates.
struct HeatSource {
  struct Term {
    std::function<double(double)> time;
    ScalarFunction space;
  };
  std::vector<Term> terms;
  ScalarFunction initial;  // f₀ in -μΔu₀ = f₀

  double operator()(double x, double y, double t) const;

  /// Source and f₀ for the closed-form solution u = 10(t+1)g(x)g(y) at μ = 1.
  static HeatSource manufactured();
  static HeatSource zero();
};

/// g(s) = s²(1-s)², the profile of the closed-form solution.
double bump(double s);
/// u(x,y,t) = 10(t+1)g(x)g(y).
double manufactured_solution(double x, double y, double t);
GradientFunction manufactured_solution_at(double t);

/// A mesh with its operators, the assembled source parts and the μ = 1
/// initial state. Immutable once built; solves take it by const reference.
class HeatDiscretization {
 public:
  HeatDiscretization(int subdivisions, HeatSource source);

  const Mesh& mesh() const { return mesh_; }
  const FemOperators& ops() const { return ops_; }
  const HeatSource& source() const { return source_; }
  int size() const { return ops_.size(); }

  Vector load(double t) const;
  /// u₀ for diffusivity μ: (1/μ) times the μ = 1 elliptic solution.
  Vector initial_state(double mu) const;

 private:
  Mesh mesh_;
  FemOperators ops_;
  HeatSource source_;
  std::vector<Vector> term_loads_;
  Vector unit_initial_;
};

/// Backward Euler: (M + Δt μK) u^n = M u^{n-1} + Δt b(t^n).
Trajectory solve_state_fine(const HeatDiscretization& disc, double mu, const TimeGrid& grid);
/// Crank–Nicolson with the source sampled at t^{m-1/2}.
Trajectory solve_state_coarse(const HeatDiscretization& disc, double mu, const TimeGrid& grid);

/// ∂u/∂μ for the backward Euler state: (M + Δt μK) Ψ^n = M Ψ^{n-1} - Δt K u^n, Ψ⁰ = -u₀/μ.
Trajectory solve_sensitivity_fine(const HeatDiscretization& disc, double mu, const Trajectory& state);
/// Crank–Nicolson analogue driven by K(u^m + u^{m-1})/2.
Trajectory solve_sensitivity_coarse(const HeatDiscretization& disc, double mu, const Trajectory& state);

struct StateAndSensitivity {
  Trajectory state;
  Trajectory sensitivity;
};

/// Both fine trajectories with a single factorization.
StateAndSensitivity solve_fine_pair(const HeatDiscretization& disc, double mu, const TimeGrid& grid);
StateAndSensitivity solve_coarse_pair(const HeatDiscretization& disc, double mu, const TimeGrid& grid);

/// Streams the fine state and sensitivity level by level without storing
/// them; used for the large reference runs.
using FineObserver = std::function<void(int level, const Vector& state, const Vector& sensitivity)>;
void march_fine(const HeatDiscretization& disc, double mu, const TimeGrid& grid, const FineObserver& observe);

/// Levels first..first+2 of a coarse grid and their Lagrange weights at t.
struct TimeStencil {
  int first = 0;
  std::array<double, 3> weights{};
};

/// Parabola through levels m-2, m-1, m for t in [t^{m-1}, t^m]; the first
/// interval reuses the parabola through 0, 1, 2.
TimeStencil quadratic_stencil(const TimeGrid& coarse, double t);

Trajectory quadratic_time_interpolate(const Trajectory& coarse, const TimeGrid& target);

}  // namespace nirb
