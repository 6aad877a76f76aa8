#pragma once

#include "nirb/pipelines.hpp"
#include "nirb/store.hpp"

#include <cstdint>
#include <functional>

namespace nirb {

/// A (fine, coarse) discretization pair with Δt ≈ h on each grid.
struct GridPair {
  double fine_size = 0.01;
  double coarse_size = 0.1;
  int fine_subdivisions = 100;
  int fine_steps = 100;
  int coarse_subdivisions = 10;
  int coarse_steps = 10;

  std::string label() const;
  TargetSpec fine_target() const { return {fine_subdivisions, fine_steps}; }
  TargetSpec coarse_target() const { return {coarse_subdivisions, coarse_steps}; }
};

GridPair make_grid_pair(double fine_size, double coarse_size, double final_time);

struct HeatStudyConfig {
  std::vector<double> mus;  // training and leave-one-out parameters
  std::vector<GridPair> pairs;
  double final_time = 1.0;
  int reference_subdivisions = 566;  // h ≈ 0.0025
  int reference_steps = 400;
  int adjoint_reference_subdivisions = 283;  // h ≈ 0.005
  int adjoint_reference_steps = 200;
  int direct_modes = 5;
  int adjoint_modes = 15;
  double delta = 1e-12;
  // Adjoint rectification. δ is absolute and noisy adjoint coefficients are
  // about 100x the clean ones, hence two values.
  double adjoint_delta = 1e-12;
  double noisy_adjoint_delta = 1e-8;
  GprOptions gp;  // dot_product kernel by default, see default_heat_config
  double noise_sigma = 0.1;
  std::uint64_t seed = 20240611;
  double convergence_mu = 1.0;
};

/// μ_i = 0.5 i, i = 1..19 and the four grid pairs of the heat tables.
HeatStudyConfig default_heat_config();

using Progress = std::function<void(const std::string&)>;

/// Reference data for the heat study, computed once per μ and kept in the store.
class HeatReferenceBank {
 public:
  HeatReferenceBank(SnapshotStore& store, HeatStudyConfig config, Progress progress = {});

  /// Computes whatever is missing for every configured μ.
  void ensure_all();
  void ensure(double mu);

  CompressedReference sensitivity(double mu, const TargetSpec& target) const;
  CompressedReference adjoint(double mu, const TargetSpec& target) const;
  /// Reference state sampled on a solver grid, with optional deterministic noise.
  Trajectory measurements(double mu, const TargetSpec& target, bool noisy) const;

  const HeatStudyConfig& config() const { return config_; }

 private:
  std::string key(const char* role, double mu, const TargetSpec& target) const;
  std::vector<TargetSpec> error_targets() const;
  std::vector<TargetSpec> measurement_targets() const;

  SnapshotStore& store_;
  HeatStudyConfig config_;
  Progress progress_;
  Mesh reference_mesh_;
};

/// Row of the direct-sensitivity table: maxima over μ of relative ℓ∞(H1_0) errors.
struct DirectTableRow {
  GridPair pair;
  double plain = 0.0;
  double rectified = 0.0;
  double gp = 0.0;
  double true_projection = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
  std::vector<LooRow> per_parameter;
};

/// Row of an adjoint table: maxima over μ of absolute ℓ∞(H1_0) adjoint errors.
struct AdjointTableRow {
  GridPair pair;
  double rectified = 0.0;
  double fine = 0.0;
  double true_projection = 0.0;
  double coarse = 0.0;
  std::vector<LooRow> per_parameter;
  std::vector<std::array<double, 3>> gradients;  // μ, fine gradient, NIRB gradient
};

DirectTableRow heat_direct_row(const HeatReferenceBank& bank, const GridPair& pair, std::vector<int> held_out = {});
AdjointTableRow heat_adjoint_row(const HeatReferenceBank& bank, const GridPair& pair, bool noisy,
                                 std::vector<int> held_out = {});

/// Everything at μ = convergence_mu with the other parameters as training set.
struct ConvergenceRow {
  GridPair pair;
  double fine = 0.0;
  double coarse = 0.0;
  double plain = 0.0;
  double rectified = 0.0;
  double gp = 0.0;
};

std::vector<ConvergenceRow> heat_convergence(const HeatReferenceBank& bank);

/// L2 error at t = T of the coarse Crank–Nicolson state against the closed-form solution (μ = 1).
struct CoarseOrderRow {
  double size = 0.0;
  int subdivisions = 0;
  int steps = 0;
  double error = 0.0;
};
std::vector<CoarseOrderRow> coarse_state_order(const std::vector<double>& sizes, double final_time = 1.0);

/// Least-squares slope of log(error) against log(size).
double fitted_slope(const std::vector<double>& sizes, const std::vector<double>& errors);

}  // namespace nirb
