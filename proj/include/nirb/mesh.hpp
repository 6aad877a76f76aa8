#pragma once

#include "nirb/types.hpp"

#include <array>
#include <vector>

namespace nirb {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Barycentric location of a point inside a mesh triangle.
struct Location {
  int triangle = -1;
  std::array<double, 3> weights{};
};

/// Structured P1 triangulation of the unit square.
///
/// Node (i, j) sits at (i/n, j/n) with index j*(n+1)+i. Every cell is split
/// along its (i,j)-(i+1,j+1) diagonal, so a mesh with n = k*m subdivisions
/// is a refinement of the mesh with m subdivisions.
struct Mesh {
  int subdivisions = 0;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_nodes;
  std::vector<char> on_boundary;
  double h = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  int node_index(int i, int j) const { return j * (subdivisions + 1) + i; }

  double signed_area(int t) const;
  Location locate(Point p) const;
  double evaluate(const Vector& field, Point p) const;
};

Mesh build_structured_mesh(int n);

/// Subdivisions for a nominal mesh size s, taken as the longest edge: √2/n ≈ s.
int subdivisions_for_size(double s);

}  // namespace nirb
