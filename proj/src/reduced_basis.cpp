#include "nirb/reduced_basis.hpp"

#include "nirb/fem.hpp"
#include "nirb/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace nirb {

ReducedBasis greedy_select(const std::vector<const Trajectory*>& snapshots, const SpMat& gram,
                           const GreedyOptions& options) {
  if (snapshots.empty()) throw InvalidArgument("greedy: empty snapshot set");
  if (!(options.tolerance > 0.0) && options.max_modes < 1) throw InvalidArgument("greedy: need a tolerance or a mode cap");
  const Eigen::Index size = snapshots.front()->field_size();
  std::vector<std::pair<int, int>> owner;
  for (size_t k = 0; k < snapshots.size(); ++k) {
    if (snapshots[k]->field_size() != size) throw InvalidArgument("greedy: snapshots live on different meshes");
    for (int n = 0; n < snapshots[k]->levels(); ++n) owner.emplace_back(static_cast<int>(k), n);
  }
  if (gram.rows() != size) throw InvalidArgument("greedy: Gram matrix size mismatch");

  Matrix residual(size, static_cast<Eigen::Index>(owner.size()));
  for (size_t j = 0; j < owner.size(); ++j) residual.col(j) = snapshots[owner[j].first]->fields[owner[j].second];
  Vector energy = kernels::column_energies(residual, gram);
  Vector exact_energy = energy;

  const int cap = options.max_modes > 0 ? options.max_modes : static_cast<int>(std::min<Eigen::Index>(size, owner.size()));
  ReducedBasis basis;
  basis.modes.resize(size, 0);
  double first_error = 0.0;
  for (int k = 0; k < cap; ++k) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < energy.size(); ++j) {
      if (energy[j] > energy[best]) best = j;
    }
    const double error = std::sqrt(std::max(0.0, energy[best]));
    if (k == 0) first_error = error;
    if (options.tolerance > 0.0 && error <= options.tolerance) break;
    if (error < 1e-12 * std::max(first_error, 1e-300) || error == 0.0) {
      basis.stopped_early = true;
      break;
    }
    Vector mode = residual.col(best);
    // Residuals are orthogonal to the span already; one more sweep cleans up round-off.
    const double before = std::sqrt(mode.dot(gram * mode));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < basis.modes.cols(); ++i) {
        mode -= basis.modes.col(i).dot(gram * mode) * basis.modes.col(i);
      }
      const double after = std::sqrt(mode.dot(gram * mode));
      if (after >= 0.1 * before) break;
    }
    const double norm = std::sqrt(mode.dot(gram * mode));
    if (!(norm > 0.0)) {
      basis.stopped_early = true;
      break;
    }
    mode /= norm;
    basis.modes.conservativeResize(Eigen::NoChange, basis.modes.cols() + 1);
    basis.modes.col(basis.modes.cols() - 1) = mode;
    basis.selection.push_back(owner[best]);
    basis.greedy_errors.push_back(error);

    const Vector weighted = gram * mode;
    const Vector c = kernels::column_dots(residual, weighted);
    kernels::subtract_rank_one(residual, mode, c);
    for (Eigen::Index j = 0; j < energy.size(); ++j) {
      energy[j] -= c[j] * c[j];
      // The downdate loses digits once most of the energy is captured.
      if (energy[j] < 1e-6 * exact_energy[j]) {
        const Vector g = gram * residual.col(j);
        energy[j] = residual.col(j).dot(g);
        exact_energy[j] = energy[j];
      }
    }
  }
  return basis;
}

ReducedBasis h1_orthogonalize(const ReducedBasis& basis, const SpMat& stiffness) {
  if (basis.size() == 0) return basis;
  const Matrix reduced = basis.modes.transpose() * (stiffness * basis.modes);
  const double scale = std::max(1.0, reduced.cwiseAbs().maxCoeff());
  if ((reduced - reduced.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw NumericalError("h1_orthogonalize: reduced stiffness is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (reduced + reduced.transpose()));
  if (eig.info() != Eigen::Success) throw NumericalError("h1_orthogonalize: eigen solver failed");
  Matrix rotation = eig.eigenvectors();
  for (Eigen::Index j = 0; j < rotation.cols(); ++j) {
    Eigen::Index pivot;
    rotation.col(j).cwiseAbs().maxCoeff(&pivot);
    if (rotation(pivot, j) < 0.0) rotation.col(j) *= -1.0;
  }
  ReducedBasis out = basis;
  out.modes = basis.modes * rotation;
  out.eigenvalues = eig.eigenvalues();
  return out;
}

Vector project_coefficients(const Vector& field, const ReducedBasis& basis, const SpMat& gram) {
  if (field.size() != basis.field_size()) throw InvalidArgument("project: field and basis live on different meshes");
  return basis.modes.transpose() * (gram * field);
}

Vector reconstruct(const Vector& coefficients, const ReducedBasis& basis) {
  if (coefficients.size() != basis.size()) throw InvalidArgument("reconstruct: coefficient count mismatch");
  return basis.modes * coefficients;
}

Matrix project_trajectory(const Trajectory& trajectory, const ReducedBasis& basis, const SpMat& gram) {
  if (trajectory.field_size() != basis.field_size()) {
    throw InvalidArgument("project: trajectory and basis live on different meshes");
  }
  return kernels::project_fields(trajectory.fields, basis.modes, gram);
}

Trajectory reconstruct_trajectory(const Matrix& coefficients, const ReducedBasis& basis, const TimeGrid& grid) {
  if (coefficients.rows() != grid.levels() || coefficients.cols() != basis.size()) {
    throw InvalidArgument("reconstruct: coefficient table does not match grid and basis");
  }
  Trajectory out;
  out.grid = grid;
  out.fields = kernels::reconstruct_fields(coefficients, basis.modes);
  return out;
}

double true_projection_error(const Trajectory& fine, const ReducedBasis& basis, const SpMat& gram,
                             const SpMat& error_gram) {
  const Trajectory projected = reconstruct_trajectory(project_trajectory(fine, basis, gram), basis, fine.grid);
  return relative_linf_error(fine, projected, error_gram);
}

}  // namespace nirb
