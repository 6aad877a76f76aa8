#pragma once

#include "nirb/mesh.hpp"
#include "nirb/trajectory.hpp"

#include <vector>

namespace nirb {

/// A solver grid that errors are measured on: a structured mesh and a time grid.
struct TargetSpec {
  int subdivisions = 0;
  int steps = 0;

  bool operator==(const TargetSpec&) const = default;
};

/// What is left of a reference trajectory y once it is only ever compared
/// against fields v living on one target grid. With P the P1 transfer from
/// the target mesh to the reference mesh and G_ref the error Gram matrix,
///   ‖y - Pv‖² = ‖y‖² - 2 vᵀ(Pᵀ G_ref y) + vᵀ(Pᵀ G_ref P) v.
/// Target times between reference levels use linear interpolation of y.
struct CompressedReference {
  TargetSpec target;
  int components = 1;
  double final_time = 1.0;
  Matrix projections;  // [field size × levels]
  Vector energies;     // ‖y(t^n)‖²
  SpMat gram;          // Pᵀ G_ref P

  int levels() const { return static_cast<int>(energies.size()); }
  TimeGrid grid() const { return TimeGrid{final_time, target.steps}; }

  double squared_error(int level, const Vector& v) const;
  /// max_n ‖y(t^n) - P v^n‖.
  double linf_error(const Trajectory& approx) const;
  double linf_norm() const;
  double relative_linf_error(const Trajectory& approx) const { return linf_error(approx) / linf_norm(); }
};

/// CompressedReference restricted to fields spanned by a basis, v^n = Φ c^n.
struct ReducedReference {
  Matrix projections;  // [levels × N] = Φᵀ r^n
  Matrix gram;         // Φᵀ G Φ
  Vector energies;
  double norm = 1.0;   // linf_norm of the full reference

  double linf_error(const Matrix& coefficients) const;
  double relative_linf_error(const Matrix& coefficients) const { return linf_error(coefficients) / norm; }
};

ReducedReference reduce_reference(const CompressedReference& ref, const Matrix& modes);

/// Streams reference levels in order and builds one CompressedReference per target.
/// `ref_gram` is for one component; it is repeated along the diagonal.
class ReferenceCompressor {
 public:
  ReferenceCompressor(const Mesh& ref_mesh, const TimeGrid& ref_grid, const SpMat& ref_gram, int components,
                      const std::vector<TargetSpec>& targets);

  void observe(int level, const Vector& y);
  std::vector<CompressedReference> finish();

 private:
  struct Sample {
    int target_level;
    int low;
    double theta;  // weight of level low+1
  };
  struct Target {
    CompressedReference data;
    SpMat transfer;  // reference nodes × target nodes, block-diagonal over components
    std::vector<Sample> samples;
  };

  void record(Target& t, int target_level, const Vector& y);

  TimeGrid ref_grid_;
  SpMat ref_gram_;
  int components_;
  std::vector<Target> targets_;
  Vector previous_;
  int next_level_ = 0;
};

/// Samples reference levels at the nearest time level and evaluates them at
/// target nodes (P1 in space); the result is a trajectory on the target grid.
class ReferenceSampler {
 public:
  ReferenceSampler(const Mesh& ref_mesh, const TimeGrid& ref_grid, int components,
                   const std::vector<TargetSpec>& targets);

  void observe(int level, const Vector& y);
  std::vector<Trajectory> finish();

  /// Reference level nearest to each target level.
  static std::vector<int> nearest_levels(const TimeGrid& ref_grid, const TimeGrid& target);

 private:
  struct Target {
    TimeGrid grid;
    SpMat restriction;  // target nodes × reference nodes
    std::vector<int> source_level;
    Trajectory values;
  };
  std::vector<Target> targets_;
  int next_level_ = 0;
};

}  // namespace nirb
