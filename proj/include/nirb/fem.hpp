#pragma once

#include "nirb/mesh.hpp"
#include "nirb/trajectory.hpp"

#include <Eigen/SparseCholesky>

#include <array>
#include <functional>
#include <memory>

namespace nirb {

using ScalarFunction = std::function<double(double x, double y)>;
using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// Analytic field with its gradient, as needed by the Ritz projection.
struct GradientFunction {
  ScalarFunction value;
  std::function<std::array<double, 2>(double x, double y)> gradient;
};

/// P1 mass and stiffness matrices over all nodes, plus the interior dof list.
struct FemOperators {
  SpMat mass;
  SpMat stiffness;
  std::vector<int> interior;
  std::vector<char> dirichlet_mask;  // 1 on interior dofs

  int size() const { return static_cast<int>(mass.rows()); }
};

FemOperators assemble_operators(const Mesh& mesh);

/// Load vector b_i = ∫ f φ_i with the 3-point interior rule.
Vector load_vector(const Mesh& mesh, const ScalarFunction& f);

/// Load for a function given directly at the quadrature points of each triangle.
/// `values` has 3 entries per triangle, ordered as the rule's points.
Vector load_from_quadrature_values(const Mesh& mesh, const std::vector<double>& values);

/// The 3-point rule in barycentric coordinates (weights sum to 1, scale by area).
const std::array<std::array<double, 3>, 3>& quadrature_barycentric();

/// Symmetric positive definite solve restricted to the interior dofs.
/// Boundary values are pinned to zero on output.
class DirichletSolver {
 public:
  DirichletSolver(const SpMat& matrix, const std::vector<int>& interior, int full_size);
  Vector solve(const Vector& rhs) const;

 private:
  std::vector<int> interior_;
  int full_size_;
  Eigen::SimplicialLDLT<SpMat> factor_;
};

/// v in V_h with (∇v, ∇w) = (∇g, ∇w) for all interior test functions.
Vector ritz_project(const GradientFunction& g, const Mesh& mesh, const FemOperators& ops);

/// Solves -μΔu = f with homogeneous Dirichlet data.
Vector solve_elliptic(double mu, const ScalarFunction& f, const Mesh& mesh, const FemOperators& ops);

Vector nodal_values(const Mesh& mesh, const ScalarFunction& f);

double l2_norm(const Vector& v, const FemOperators& ops);
/// ‖v_h - f‖_{L2} with a degree-5 rule, for comparisons with closed-form solutions.
double l2_error_against(const Mesh& mesh, const Vector& field, const ScalarFunction& f);
double h1_seminorm(const Vector& v, const FemOperators& ops);
double linf_h1_trajectory_error(const Trajectory& a, const Trajectory& b, const FemOperators& ops);

SpMat block_diagonal(const SpMat& block, int copies);

/// Relative ℓ∞-in-time error with respect to `reference`, measured with `gram`.
double relative_linf_error(const Trajectory& reference, const Trajectory& approx, const SpMat& gram);

}  // namespace nirb
