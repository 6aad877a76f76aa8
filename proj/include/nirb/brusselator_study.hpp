#pragma once

#include "nirb/heat_study.hpp"

namespace nirb {

struct BrusselatorStudyConfig {
  double final_time = 2.0;
  double fine_size = 0.02;   // h = Δt_F
  double coarse_size = 0.1;  // H = Δt_G
  int reference_subdivisions = 142;  // h ≈ 0.01
  int reference_steps = 400;  // dt = 0.005 at T = 2
  std::vector<BrusselatorParams> training;
  std::vector<BrusselatorParams> rows;  // held out one at a time, each must be in training
  std::vector<BrusselatorParameter> outputs{BrusselatorParameter::a, BrusselatorParameter::b};
  int modes = 10;
  int state_modes = 10;
  double delta = 1e-10;
  GprOptions gp;
  double noise_sigma = 0.1;
  std::uint64_t seed = 20240611;
  int timing_repeats = 3;

  int fine_subdivisions() const { return subdivisions_for_size(fine_size); }
  int coarse_subdivisions() const { return subdivisions_for_size(coarse_size); }
  TimeGrid fine_grid() const { return TimeGrid::with_step(final_time, fine_size); }
  TimeGrid coarse_grid() const { return TimeGrid::with_step(final_time, coarse_size); }
  TargetSpec fine_target() const { return {fine_subdivisions(), fine_grid().steps}; }
  TargetSpec coarse_target() const { return {coarse_subdivisions(), coarse_grid().steps}; }
};

/// Desk scale: T = 2, N = 10, 12 training parameters a∈{3,4} × b∈{2,3,4} × α∈{0.01,0.0005}.
BrusselatorStudyConfig default_brusselator_config();
/// Table scale: T = 4, N = 40, 36 training parameters, reference h = Δt = 0.005. Hours of CPU.
BrusselatorStudyConfig full_brusselator_config();

/// Reference tangents (compressed) and noisy state measurements per parameter.
class BrusselatorReferenceBank {
 public:
  BrusselatorReferenceBank(SnapshotStore& store, BrusselatorStudyConfig config, Progress progress = {});

  void ensure(const BrusselatorParams& p);
  CompressedReference tangent(const BrusselatorParams& p, BrusselatorParameter which, const TargetSpec& target) const;
  Trajectory measurements(const BrusselatorParams& p, const TargetSpec& target, bool noisy = true) const;

  const BrusselatorStudyConfig& config() const { return config_; }

 private:
  std::string key(const BrusselatorParams& p, const std::string& role, const TargetSpec& target) const;

  SnapshotStore& store_;
  BrusselatorStudyConfig config_;
  Progress progress_;
  Mesh reference_mesh_;
};

struct BrusselatorTableRow {
  BrusselatorParams params;
  BrusselatorParameter output = BrusselatorParameter::a;
  double fine = 0.0;
  double coarse = 0.0;
  double true_projection = 0.0;
  double rectified = 0.0;
  double gp = 0.0;
  double plain = 0.0;
};

struct BrusselatorTables {
  std::vector<BrusselatorTableRow> rows;
  std::vector<Vector> sqrt_eigenvalues;  // per output, basis from every training parameter
};

/// Fine and coarse state + tangent snapshots for every training parameter.
std::vector<SnapshotPair> brusselator_snapshots(const BrusselatorStudyConfig& config);

/// Leave-one-out over config.rows against the reference tangents.
BrusselatorTables brusselator_tables(BrusselatorReferenceBank& bank, const std::vector<SnapshotPair>& snapshots);

struct BrusselatorGradientRow {
  BrusselatorParams params;
  Vector fine;  // dF/d(a, b, alpha)
  Vector nirb;
};

/// Objective gradients from the fine adjoint and from the two-reduction NIRB adjoint.
std::vector<BrusselatorGradientRow> brusselator_gradients(BrusselatorReferenceBank& bank);

struct BrusselatorTimings {
  double fine_solve = 0.0;    // state and tangents
  double coarse_solve = 0.0;
  double offline = 0.0;
  double online_rectified = 0.0;
  double online_gp = 0.0;
};

/// Median wall clock over config.timing_repeats runs at the first row.
BrusselatorTimings brusselator_timings(const BrusselatorStudyConfig& config, const std::vector<SnapshotPair>& snapshots);

std::vector<Vector> parameter_vectors(const std::vector<BrusselatorParams>& params);
std::string params_label(const BrusselatorParams& p);

}  // namespace nirb
