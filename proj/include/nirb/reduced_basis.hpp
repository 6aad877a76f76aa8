#pragma once

#include "nirb/trajectory.hpp"

#include <utility>

namespace nirb {

/// L2-orthonormal modes (columns), optionally rotated to be H1-orthogonal.
struct ReducedBasis {
  Matrix modes;
  Vector eigenvalues;                          // filled by h1_orthogonalize, ascending
  std::vector<std::pair<int, int>> selection;  // (trajectory index, time level) per greedy pick
  std::vector<double> greedy_errors;           // residual norm of each pick
  bool stopped_early = false;                  // candidate residual was numerically zero

  int size() const { return static_cast<int>(modes.cols()); }
  Eigen::Index field_size() const { return modes.rows(); }
};

struct GreedyOptions {
  double tolerance = 0.0;  // absolute residual in the Gram norm; 0 means "use max_modes only"
  int max_modes = 5;
};

/// Algorithm: repeatedly add the snapshot with the largest projection residual.
/// Snapshots are all levels of all trajectories; ties go to the lowest
/// trajectory index, then the lowest level.
ReducedBasis greedy_select(const std::vector<const Trajectory*>& snapshots, const SpMat& gram,
                           const GreedyOptions& options);

/// Rotates the modes so that modesᵀ K modes = diag(λ) with λ ascending.
ReducedBasis h1_orthogonalize(const ReducedBasis& basis, const SpMat& stiffness);

Vector project_coefficients(const Vector& field, const ReducedBasis& basis, const SpMat& gram);
Vector reconstruct(const Vector& coefficients, const ReducedBasis& basis);

/// Row n = coefficients of trajectory level n.
Matrix project_trajectory(const Trajectory& trajectory, const ReducedBasis& basis, const SpMat& gram);
Trajectory reconstruct_trajectory(const Matrix& coefficients, const ReducedBasis& basis, const TimeGrid& grid);

/// Relative ℓ∞-in-time error of the per-level projection, measured in `error_gram`.
double true_projection_error(const Trajectory& fine, const ReducedBasis& basis, const SpMat& gram,
                             const SpMat& error_gram);

}  // namespace nirb
