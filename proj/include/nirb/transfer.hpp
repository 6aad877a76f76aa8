#pragma once

#include "nirb/mesh.hpp"

namespace nirb {

/// Matrix P with (P v)_i = value of the P1 field v (on `from`) at node i of `to`.
SpMat interpolation_matrix(const Mesh& from, const Mesh& to);

/// P1 point evaluation of a field on `from` at the nodes of `to`.
Vector interpolate_space(const Vector& field, const Mesh& from, const Mesh& to);

}  // namespace nirb
