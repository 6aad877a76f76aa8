#pragma once

#include "nirb/fem.hpp"

#include <Eigen/SparseLU>

#include <functional>
#include <string>

namespace nirb {

struct BrusselatorParams {
  double a = 3.0;
  double b = 2.0;
  double alpha = 0.01;
};

enum class BrusselatorParameter { a, b, alpha };
enum class TimeScheme { euler_fine, cn_coarse };

std::string parameter_name(BrusselatorParameter p);
double parameter_value(const BrusselatorParams& params, BrusselatorParameter p);
BrusselatorParams with_parameter(BrusselatorParams params, BrusselatorParameter p, double value);

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 25;
};

/// P1 discretization of
///   u1_t = a + u1²u2 - (b+1)u1 + αΔu1,   u2_t = b u1 - u1²u2 + αΔu2
/// with homogeneous Neumann data. Unknowns are stacked [u1; u2].
class BrusselatorSystem {
 public:
  explicit BrusselatorSystem(int subdivisions);

  const Mesh& mesh() const { return mesh_; }
  const FemOperators& ops() const { return ops_; }
  int nodes() const { return n_; }
  int size() const { return 2 * n_; }
  const SpMat& block_mass() const { return block_mass_; }

  /// Weak right-hand side F(u) (mass matrix not inverted).
  Vector rhs(const BrusselatorParams& p, const Vector& u) const;
  /// ∂F/∂u with the same sparsity pattern for every state.
  SpMat jacobian(const BrusselatorParams& p, const Vector& u) const;
  /// block_mass - θ Δt ∂F/∂u.
  SpMat step_matrix(const BrusselatorParams& p, const Vector& u, double theta_dt) const;
  /// ∂F/∂p at state u.
  Vector parameter_source(BrusselatorParameter which, const Vector& u) const;

  /// u1 = 2 + 0.25y, u2 = 1 + 0.8x.
  Vector default_initial_state() const;
  Vector constant_state(double u1, double u2) const;

  /// Fixed pattern used by every step matrix; factorizations reuse its ordering.
  const SpMat& pattern() const { return pattern_; }

 private:
  void reaction(const Vector& u, Vector* values, std::vector<double>* d1, std::vector<double>* d2) const;

  Mesh mesh_;
  FemOperators ops_;
  int n_ = 0;
  SpMat block_mass_;
  SpMat pattern_;                                // 2n x 2n block pattern
  std::vector<std::array<int, 9>> local_index_;  // triangle entry -> mesh-pattern slot
  std::vector<std::array<int, 4>> block_slot_;   // mesh slot -> four block slots
  std::vector<double> mass_values_;
  std::vector<double> stiffness_values_;
  Vector lumped_one_;  // M 1
};

struct NewtonReport {
  int max_iterations = 0;
  int total_iterations = 0;
  int factorizations = 0;  // step matrices set up, Newton and tangent
  double worst_residual = 0.0;
};

using BrusselatorObserver =
    std::function<void(int level, const Vector& state, const std::vector<Vector>& tangents)>;

/// Time march with one Newton solve per step. Tangents of the requested
/// parameters (Ψ⁰ = 0) are advanced alongside, with the step matrix at the
/// new level.
void march_brusselator(const BrusselatorSystem& sys, const BrusselatorParams& p, const TimeGrid& grid,
                       TimeScheme scheme, const std::vector<BrusselatorParameter>& which,
                       const BrusselatorObserver& observe, const NewtonOptions& newton = {},
                       NewtonReport* report = nullptr, const Vector* initial = nullptr);

struct BrusselatorSolution {
  Trajectory state;
  std::vector<Trajectory> tangents;
};

BrusselatorSolution solve_brusselator_with_tangents(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                                    const TimeGrid& grid, const std::vector<BrusselatorParameter>& which,
                                                    TimeScheme scheme, const NewtonOptions& newton = {},
                                                    NewtonReport* report = nullptr);

/// Trajectory on [0, grid.final_time]; one nonlinear solve per step.
Trajectory solve_brusselator(const BrusselatorSystem& sys, const BrusselatorParams& p, const TimeGrid& grid,
                             TimeScheme scheme, const NewtonOptions& newton = {}, NewtonReport* report = nullptr,
                             const Vector* initial = nullptr);

/// Tangent trajectories ∂u/∂p for each requested parameter, Ψ⁰ = 0.
std::vector<Trajectory> solve_brusselator_tangents(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                                   const Trajectory& state,
                                                   const std::vector<BrusselatorParameter>& which,
                                                   TimeScheme scheme);

/// Discrete adjoint of ½Σ_n ‖u^n - ū^n‖²_{L2} (continuous scaling), χ^N = 0.
Trajectory solve_brusselator_adjoint(const BrusselatorSystem& sys, const BrusselatorParams& p,
                                     const Trajectory& state, const Trajectory& measurements, TimeScheme scheme);

/// Σ_{n≥1} (χ^{n-1})ᵀ ∂F/∂p(u^n); exact for the backward Euler scheme.
double brusselator_gradient(const BrusselatorSystem& sys, BrusselatorParameter which, const Trajectory& state,
                            const Trajectory& adjoint);

double brusselator_objective(const BrusselatorSystem& sys, const Trajectory& state, const Trajectory& measurements);

}  // namespace nirb
