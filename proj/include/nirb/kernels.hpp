#pragma once

#include "nirb/types.hpp"

#include <vector>

// Data-parallel kernels used by the reduction. Each OpenMP kernel has a
// serial twin in nirb::kernels::serial; the tests check they agree and the
// benchmark target times them against each other.
namespace nirb::kernels {

/// Sᵀw for a column snapshot matrix S.
Vector column_dots(const Matrix& columns, const Vector& w);

/// diag(Sᵀ G S): squared G-norms of every column.
Vector column_energies(const Matrix& columns, const SpMat& gram);

/// Row n holds (fields[n], modes_i)_G for every mode i.
Matrix project_fields(const std::vector<Vector>& fields, const Matrix& modes, const SpMat& gram);

/// fields[n] = modes * coefficients.row(n)ᵀ.
std::vector<Vector> reconstruct_fields(const Matrix& coefficients, const Matrix& modes);

/// In place: columns -= basis_vector * coefficientsᵀ (rank-one downdate used by the greedy loop).
void subtract_rank_one(Matrix& columns, const Vector& basis_vector, const Vector& coefficients);

namespace serial {
Vector column_dots(const Matrix& columns, const Vector& w);
Vector column_energies(const Matrix& columns, const SpMat& gram);
Matrix project_fields(const std::vector<Vector>& fields, const Matrix& modes, const SpMat& gram);
std::vector<Vector> reconstruct_fields(const Matrix& coefficients, const Matrix& modes);
void subtract_rank_one(Matrix& columns, const Vector& basis_vector, const Vector& coefficients);
}  // namespace serial

int thread_count();

}  // namespace nirb::kernels
