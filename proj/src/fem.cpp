#include "nirb/fem.hpp"

#include <cmath>

namespace nirb {

namespace {

struct ElementGeometry {
  double area;
  std::array<std::array<double, 2>, 3> grad;  // ∇φ_k, constant on the element
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.nodes[tri[0]];
  const Point& b = mesh.nodes[tri[1]];
  const Point& c = mesh.nodes[tri[2]];
  const double area = mesh.signed_area(t);
  if (!(area > 1e-14)) throw NumericalError("assembly: degenerate or inverted triangle " + std::to_string(t));
  const double inv = 1.0 / (2.0 * area);
  ElementGeometry g;
  g.area = area;
  g.grad[0] = {(b.y - c.y) * inv, (c.x - b.x) * inv};
  g.grad[1] = {(c.y - a.y) * inv, (a.x - c.x) * inv};
  g.grad[2] = {(a.y - b.y) * inv, (b.x - a.x) * inv};
  return g;
}

Point quadrature_point(const Mesh& mesh, int t, const std::array<double, 3>& bary) {
  const auto& tri = mesh.triangles[t];
  Point p;
  for (int k = 0; k < 3; ++k) {
    p.x += bary[k] * mesh.nodes[tri[k]].x;
    p.y += bary[k] * mesh.nodes[tri[k]].y;
  }
  return p;
}

}  // namespace

const std::array<std::array<double, 3>, 3>& quadrature_barycentric() {
  static const std::array<std::array<double, 3>, 3> rule = {{
      {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
  }};
  return rule;
}

FemOperators assemble_operators(const Mesh& mesh) {
  const int n = mesh.node_count();
  std::vector<Triplet> mass_entries;
  std::vector<Triplet> stiff_entries;
  mass_entries.reserve(9 * mesh.triangles.size());
  stiff_entries.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        mass_entries.emplace_back(tri[r], tri[c], g.area / 12.0 * (r == c ? 2.0 : 1.0));
        stiff_entries.emplace_back(
            tri[r], tri[c], g.area * (g.grad[r][0] * g.grad[c][0] + g.grad[r][1] * g.grad[c][1]));
      }
    }
  }
  FemOperators ops;
  ops.mass.resize(n, n);
  ops.stiffness.resize(n, n);
  ops.mass.setFromTriplets(mass_entries.begin(), mass_entries.end());
  ops.stiffness.setFromTriplets(stiff_entries.begin(), stiff_entries.end());
  // Drop exact zeros produced by cancelling gradient products.
  ops.stiffness.prune(0.0, 0.0);
  ops.dirichlet_mask.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!mesh.on_boundary[i]) {
      ops.interior.push_back(i);
      ops.dirichlet_mask[i] = 1;
    }
  }
  return ops;
}

Vector load_vector(const Mesh& mesh, const ScalarFunction& f) {
  const auto& rule = quadrature_barycentric();
  std::vector<double> values(3 * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int q = 0; q < 3; ++q) {
      const Point p = quadrature_point(mesh, t, rule[q]);
      values[3 * t + q] = f(p.x, p.y);
    }
  }
  return load_from_quadrature_values(mesh, values);
}

Vector load_from_quadrature_values(const Mesh& mesh, const std::vector<double>& values) {
  if (values.size() != 3 * mesh.triangles.size()) throw InvalidArgument("quadrature value count mismatch");
  const auto& rule = quadrature_barycentric();
  Vector b = Vector::Zero(mesh.node_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double w = mesh.signed_area(t) / 3.0;
    for (int q = 0; q < 3; ++q) {
      const double fq = w * values[3 * t + q];
      for (int k = 0; k < 3; ++k) b[tri[k]] += fq * rule[q][k];
    }
  }
  return b;
}

DirichletSolver::DirichletSolver(const SpMat& matrix, const std::vector<int>& interior, int full_size)
    : interior_(interior), full_size_(full_size) {
  std::vector<int> position(full_size, -1);
  for (size_t k = 0; k < interior_.size(); ++k) position[interior_[k]] = static_cast<int>(k);
  std::vector<Triplet> entries;
  entries.reserve(matrix.nonZeros());
  for (int col = 0; col < matrix.outerSize(); ++col) {
    if (position[col] < 0) continue;
    for (SpMat::InnerIterator it(matrix, col); it; ++it) {
      if (position[it.row()] >= 0) entries.emplace_back(position[it.row()], position[col], it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(interior_.size());
  SpMat reduced(m, m);
  reduced.setFromTriplets(entries.begin(), entries.end());
  factor_.compute(reduced);
  if (factor_.info() != Eigen::Success) throw NumericalError("Dirichlet solver: factorization failed");
  const Vector d = factor_.vectorD();
  if (m > 0 && d.minCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff()) {
    throw NumericalError("Dirichlet solver: matrix is singular or indefinite on the interior");
  }
}

Vector DirichletSolver::solve(const Vector& rhs) const {
  if (rhs.size() != full_size_) throw InvalidArgument("Dirichlet solver: rhs size mismatch");
  Vector reduced(static_cast<Eigen::Index>(interior_.size()));
  for (size_t k = 0; k < interior_.size(); ++k) reduced[k] = rhs[interior_[k]];
  const Vector x = factor_.solve(reduced);
  Vector full = Vector::Zero(full_size_);
  for (size_t k = 0; k < interior_.size(); ++k) full[interior_[k]] = x[k];
  return full;
}

Vector ritz_project(const GradientFunction& g, const Mesh& mesh, const FemOperators& ops) {
  const auto& rule = quadrature_barycentric();
  Vector rhs = Vector::Zero(mesh.node_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const ElementGeometry geo = element_geometry(mesh, t);
    std::array<double, 2> mean_grad{0.0, 0.0};
    for (int q = 0; q < 3; ++q) {
      const Point p = quadrature_point(mesh, t, rule[q]);
      const auto gq = g.gradient(p.x, p.y);
      mean_grad[0] += gq[0] / 3.0;
      mean_grad[1] += gq[1] / 3.0;
    }
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      rhs[tri[k]] += geo.area * (mean_grad[0] * geo.grad[k][0] + mean_grad[1] * geo.grad[k][1]);
    }
  }
  DirichletSolver solver(ops.stiffness, ops.interior, ops.size());
  return solver.solve(rhs);
}

Vector solve_elliptic(double mu, const ScalarFunction& f, const Mesh& mesh, const FemOperators& ops) {
  if (!(mu > 0.0)) throw InvalidArgument("solve_elliptic: diffusivity must be positive");
  DirichletSolver solver(ops.stiffness, ops.interior, ops.size());
  return solver.solve(load_vector(mesh, f)) / mu;
}

Vector nodal_values(const Mesh& mesh, const ScalarFunction& f) {
  Vector v(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) v[i] = f(mesh.nodes[i].x, mesh.nodes[i].y);
  return v;
}

double l2_norm(const Vector& v, const FemOperators& ops) {
  if (v.size() != ops.size()) throw InvalidArgument("l2_norm: size mismatch");
  return std::sqrt(std::max(0.0, v.dot(ops.mass * v)));
}

double l2_error_against(const Mesh& mesh, const Vector& field, const ScalarFunction& f) {
  if (field.size() != mesh.node_count()) throw InvalidArgument("l2_error_against: size mismatch");
  // 7-point Dunavant rule, exact for degree 5.
  struct Node {
    double a, b, c, w;
  };
  constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115;
  constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456;
  constexpr double w1 = 0.132394152788506, w2 = 0.125939180544827;
  static const Node rule[7] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225}, {a1, b1, b1, w1}, {b1, a1, b1, w1},
                               {b1, b1, a1, w1}, {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2}};
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.signed_area(t);
    for (const Node& q : rule) {
      const std::array<double, 3> bary{q.a, q.b, q.c};
      const Point p = quadrature_point(mesh, t, bary);
      double vh = 0.0;
      for (int k = 0; k < 3; ++k) vh += bary[k] * field[tri[k]];
      const double d = vh - f(p.x, p.y);
      total += area * q.w * d * d;
    }
  }
  return std::sqrt(total);
}

double h1_seminorm(const Vector& v, const FemOperators& ops) {
  if (v.size() != ops.size()) throw InvalidArgument("h1_seminorm: size mismatch");
  return std::sqrt(std::max(0.0, v.dot(ops.stiffness * v)));
}

double linf_h1_trajectory_error(const Trajectory& a, const Trajectory& b, const FemOperators& ops) {
  check_aligned(a, b, "linf_h1_trajectory_error");
  double worst = 0.0;
  for (int n = 0; n < a.levels(); ++n) worst = std::max(worst, h1_seminorm(a.fields[n] - b.fields[n], ops));
  return worst;
}

SpMat block_diagonal(const SpMat& block, int copies) {
  std::vector<Triplet> entries;
  entries.reserve(block.nonZeros() * copies);
  for (int c = 0; c < copies; ++c) {
    const auto row_offset = c * block.rows();
    const auto col_offset = c * block.cols();
    for (int col = 0; col < block.outerSize(); ++col) {
      for (SpMat::InnerIterator it(block, col); it; ++it) {
        entries.emplace_back(row_offset + it.row(), col_offset + col, it.value());
      }
    }
  }
  SpMat out(block.rows() * copies, block.cols() * copies);
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

double relative_linf_error(const Trajectory& reference, const Trajectory& approx, const SpMat& gram) {
  check_aligned(reference, approx, "relative_linf_error");
  double worst = 0.0;
  double scale = 0.0;
  for (int n = 0; n < reference.levels(); ++n) {
    const Vector d = reference.fields[n] - approx.fields[n];
    worst = std::max(worst, std::sqrt(std::max(0.0, d.dot(gram * d))));
    scale = std::max(scale, std::sqrt(std::max(0.0, reference.fields[n].dot(gram * reference.fields[n]))));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace nirb
