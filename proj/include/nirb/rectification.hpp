#pragma once

#include "nirb/types.hpp"

#include <vector>

namespace nirb {

/// One N×N map per fine time level taking coarse projection coefficients to
/// fine ones: R^n = ((AᵀA + δI)⁻¹ AᵀB)ᵀ with A, B of shape [N_train × N].
struct RectificationSet {
  std::vector<Matrix> matrices;
  double delta = 1e-10;

  int steps() const { return static_cast<int>(matrices.size()); }
  Vector apply(int level, const Vector& coarse) const;
  /// Applies R^n to row n of a [levels × N] coefficient table.
  Matrix apply_all(const Matrix& coarse) const;
};

RectificationSet build_rectification(const std::vector<Matrix>& coarse, const std::vector<Matrix>& fine, double delta);

/// Splits a stack of per-parameter coefficient tables ([levels × N] each)
/// into per-level [N_train × N] matrices.
std::vector<Matrix> per_level(const std::vector<Matrix>& tables);

}  // namespace nirb
