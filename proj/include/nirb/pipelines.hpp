#pragma once

#include "nirb/brusselator.hpp"
#include "nirb/gpr.hpp"
#include "nirb/heat.hpp"
#include "nirb/rectification.hpp"
#include "nirb/reduced_basis.hpp"
#include "nirb/reference.hpp"

#include <memory>
#include <string>

namespace nirb {

/// Fine-mesh inner products and the coarse-to-fine transfer for one kind of field.
struct FieldSpace {
  SpMat mass;       // projection Gram (L2)
  SpMat stiffness;  // used to H1-orthogonalize the modes
  SpMat transfer;   // fine nodes × coarse nodes, P1 evaluation
  TimeGrid fine_grid;
  TimeGrid coarse_grid;
};

FieldSpace make_field_space(const Mesh& fine_mesh, const FemOperators& fine_ops, const Mesh& coarse_mesh,
                            int components, const TimeGrid& fine_grid, const TimeGrid& coarse_grid);

/// Coefficients of the time- then space-interpolated coarse trajectory on the
/// fine time levels. `transferred_modes` = Pᵀ M Φ, so the interpolated field
/// itself is never formed: A^n = Σ_k w_k (Pᵀ M Φ)ᵀ u_H^{m_k}.
Matrix coarse_coefficients(const Trajectory& coarse, const Matrix& transferred_modes, const TimeGrid& fine_grid);

struct ReductionOptions {
  int modes = 5;
  double greedy_tolerance = 0.0;
  double delta = 1e-10;
};

/// Offline data for one field: basis, rectification and the training coefficient tables.
struct TwoGridReduction {
  ReducedBasis basis;
  Matrix transferred_modes;
  RectificationSet rectification;
  std::vector<Matrix> fine_tables;
  std::vector<Matrix> coarse_tables;

  Matrix plain(const Trajectory& coarse, const FieldSpace& space) const;
  Matrix rectified(const Trajectory& coarse, const FieldSpace& space) const;
};

TwoGridReduction build_reduction(const std::vector<const Trajectory*>& fine, const std::vector<const Trajectory*>& coarse,
                                 const FieldSpace& space, const ReductionOptions& options);

/// One "global in time" GP per output field: flattened coarse state
/// coefficients in, flattened fine coefficients out.
struct GpReduction {
  GprModel model;
  int levels = 0;
  int modes = 0;

  Matrix predict(const Matrix& input_table) const;
};

Vector flatten(const Matrix& table);
GpReduction build_gp(const std::vector<Matrix>& input_tables, const std::vector<Matrix>& output_tables,
                     const GprOptions& options);

/// A parametric problem solved on a fine and a coarse grid. Parameters are
/// vectors (μ for heat, (a, b, α) for the Brusselator).
class TwoGridProblem {
 public:
  virtual ~TwoGridProblem() = default;

  virtual int parameter_count() const = 0;
  virtual std::string parameter_label(int p) const = 0;
  virtual const FieldSpace& space() const = 0;
  virtual const SpMat& error_gram() const = 0;

  virtual Trajectory fine_state(const Vector& mu) const = 0;
  virtual std::vector<Trajectory> fine_sensitivities(const Vector& mu, const Trajectory& state) const = 0;
  virtual Trajectory coarse_state(const Vector& mu) const = 0;
  virtual std::vector<Trajectory> coarse_sensitivities(const Vector& mu, const Trajectory& state) const = 0;

  /// State and sensitivities together; problems that can share work override these.
  struct Solution {
    Trajectory state;
    std::vector<Trajectory> sensitivities;
  };
  virtual Solution fine_solution(const Vector& mu) const;
  virtual Solution coarse_solution(const Vector& mu) const;

  virtual Trajectory fine_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const = 0;
  virtual Trajectory coarse_adjoint(const Vector& mu, const Trajectory& state,
                                    const Trajectory& measurements) const = 0;
  /// dF/dμ_p for every parameter from fine-grid state and adjoint trajectories.
  virtual Vector gradient(const Vector& mu, const Trajectory& state, const Trajectory& adjoint,
                          const Trajectory& measurements) const = 0;
};

class HeatTwoGrid : public TwoGridProblem {
 public:
  HeatTwoGrid(int fine_subdivisions, int coarse_subdivisions, const TimeGrid& fine_grid, const TimeGrid& coarse_grid,
              const HeatSource& source = HeatSource::manufactured());

  int parameter_count() const override { return 1; }
  std::string parameter_label(int) const override { return "mu"; }
  const FieldSpace& space() const override { return space_; }
  const SpMat& error_gram() const override { return fine_.ops().stiffness; }

  Trajectory fine_state(const Vector& mu) const override;
  std::vector<Trajectory> fine_sensitivities(const Vector& mu, const Trajectory& state) const override;
  Trajectory coarse_state(const Vector& mu) const override;
  std::vector<Trajectory> coarse_sensitivities(const Vector& mu, const Trajectory& state) const override;
  Trajectory fine_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const override;
  Trajectory coarse_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const override;
  Vector gradient(const Vector& mu, const Trajectory& state, const Trajectory& adjoint,
                  const Trajectory& measurements) const override;

  const HeatDiscretization& fine() const { return fine_; }
  const HeatDiscretization& coarse() const { return coarse_; }

 private:
  HeatDiscretization fine_;
  HeatDiscretization coarse_;
  FieldSpace space_;
};

class BrusselatorTwoGrid : public TwoGridProblem {
 public:
  BrusselatorTwoGrid(int fine_subdivisions, int coarse_subdivisions, const TimeGrid& fine_grid,
                     const TimeGrid& coarse_grid, std::vector<BrusselatorParameter> parameters);

  int parameter_count() const override { return static_cast<int>(parameters_.size()); }
  std::string parameter_label(int p) const override { return parameter_name(parameters_.at(p)); }
  const FieldSpace& space() const override { return space_; }
  const SpMat& error_gram() const override { return error_gram_; }

  Trajectory fine_state(const Vector& mu) const override;
  std::vector<Trajectory> fine_sensitivities(const Vector& mu, const Trajectory& state) const override;
  Trajectory coarse_state(const Vector& mu) const override;
  std::vector<Trajectory> coarse_sensitivities(const Vector& mu, const Trajectory& state) const override;
  Solution fine_solution(const Vector& mu) const override;
  Solution coarse_solution(const Vector& mu) const override;
  Trajectory fine_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const override;
  Trajectory coarse_adjoint(const Vector& mu, const Trajectory& state, const Trajectory& measurements) const override;
  Vector gradient(const Vector& mu, const Trajectory& state, const Trajectory& adjoint,
                  const Trajectory& measurements) const override;

  const BrusselatorSystem& fine() const { return fine_; }
  const BrusselatorSystem& coarse() const { return coarse_; }
  const std::vector<BrusselatorParameter>& parameters() const { return parameters_; }

  static BrusselatorParams unpack(const Vector& mu);
  static Vector pack(const BrusselatorParams& p);

 private:
  BrusselatorSystem fine_;
  BrusselatorSystem coarse_;
  std::vector<BrusselatorParameter> parameters_;
  FieldSpace space_;
  SpMat error_gram_;
};

/// Fine and coarse solutions for one parameter.
struct SnapshotPair {
  Vector parameter;
  Trajectory fine_state;
  std::vector<Trajectory> fine_sensitivities;
  Trajectory coarse_state;
  std::vector<Trajectory> coarse_sensitivities;
};

/// Solves every parameter on both grids, in parallel across parameters.
std::vector<SnapshotPair> generate_snapshots(const TwoGridProblem& problem, const std::vector<Vector>& parameters,
                                             bool with_coarse = true);

struct OfflineOptions {
  ReductionOptions reduction;
  int state_modes = 5;  // basis size for the GP inputs
  bool with_gp = true;
  GprOptions gp;
};

struct OfflineArtifacts {
  TwoGridReduction state;
  std::vector<TwoGridReduction> sensitivities;  // one per parameter p
  std::vector<GpReduction> gp;                  // one per parameter p (empty without GP)
};

OfflineArtifacts offline_direct(const TwoGridProblem& problem, const std::vector<SnapshotPair>& training,
                                const OfflineOptions& options);
OfflineArtifacts offline_direct(const TwoGridProblem& problem, const std::vector<Vector>& training,
                                const OfflineOptions& options);

struct NirbResult {
  Trajectory trajectory;
  std::string variant;
  double seconds = 0.0;
};

/// Coarse state and sensitivity solves, interpolation, projection.
NirbResult online_classical(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts, int p);
/// online_classical followed by the rectification of every time level.
NirbResult online_rectified(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts, int p);
/// One coarse state solve; every sensitivity comes from its GP.
std::vector<NirbResult> online_gp(const TwoGridProblem& problem, const Vector& mu, const OfflineArtifacts& artifacts);

/// Measurements on a given grid: fine = false gives the coarse-grid version.
using MeasurementProvider = std::function<Trajectory(const Vector& mu, bool fine)>;

struct AdjointArtifacts {
  TwoGridReduction state;
  TwoGridReduction adjoint;
};

struct AdjointSnapshots {
  Vector parameter;
  Trajectory fine_state;
  Trajectory fine_adjoint;
  Trajectory coarse_state;
  Trajectory coarse_adjoint;
};

std::vector<AdjointSnapshots> generate_adjoint_snapshots(const TwoGridProblem& problem,
                                                         const std::vector<Vector>& parameters,
                                                         const MeasurementProvider& measurements);

AdjointArtifacts offline_adjoint(const TwoGridProblem& problem, const std::vector<AdjointSnapshots>& training,
                                 const ReductionOptions& options);

struct AdjointResult {
  NirbResult state;
  NirbResult adjoint;
  Vector gradient;
};

/// Coarse state and adjoint, both rectified, then the gradient quadrature on the fine grid.
AdjointResult online_adjoint(const TwoGridProblem& problem, const Vector& mu, const AdjointArtifacts& artifacts,
                             const MeasurementProvider& measurements);

/// One leave-one-out case: the solutions of one parameter plus its references.
struct LooCase {
  Vector parameter;
  const Trajectory* fine_state = nullptr;
  const Trajectory* coarse_state = nullptr;
  std::vector<const Trajectory*> fine;    // quantity per output p
  std::vector<const Trajectory*> coarse;
  std::vector<const CompressedReference*> fine_reference;    // per p, on the fine target
  std::vector<const CompressedReference*> coarse_reference;  // per p, on the coarse target
};

struct LooOptions {
  ReductionOptions reduction;
  int state_modes = 5;
  bool with_gp = true;
  GprOptions gp;
  bool relative = true;
  std::vector<int> held_out;  // empty: every case
};

struct LooRow {
  Vector parameter;
  int output = 0;
  double plain = 0.0;
  double rectified = 0.0;
  double gp = 0.0;
  double true_projection = 0.0;
  double coarse = 0.0;
  double fine = 0.0;
  Vector eigenvalues;
};

/// For each held-out case: rebuild bases and rectification from all other
/// cases, run every variant and measure it against the held-out references.
std::vector<LooRow> leave_one_out(const std::vector<LooCase>& cases, const FieldSpace& space, const LooOptions& options);

}  // namespace nirb
