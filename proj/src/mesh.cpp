#include "nirb/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace nirb {

Mesh build_structured_mesh(int n) {
  if (n < 1) throw InvalidArgument("build_structured_mesh: n must be >= 1");
  Mesh mesh;
  mesh.subdivisions = n;
  const int side = n + 1;
  mesh.nodes.reserve(static_cast<size_t>(side) * side);
  mesh.on_boundary.assign(static_cast<size_t>(side) * side, 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      if (i == 0 || j == 0 || i == n || j == n) {
        mesh.on_boundary[mesh.node_index(i, j)] = 1;
        mesh.boundary_nodes.push_back(mesh.node_index(i, j));
      }
    }
  }
  mesh.triangles.reserve(2 * static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = mesh.node_index(i, j);
      const int v10 = mesh.node_index(i + 1, j);
      const int v01 = mesh.node_index(i, j + 1);
      const int v11 = mesh.node_index(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  mesh.h = std::sqrt(2.0) / n;
  return mesh;
}

int subdivisions_for_size(double s) {
  if (!(s > 0.0) || s > std::sqrt(2.0)) throw InvalidArgument("mesh size must lie in (0, sqrt(2)]");
  return std::max(1, static_cast<int>(std::lround(std::sqrt(2.0) / s)));
}

double Mesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = nodes[tri[0]];
  const Point& b = nodes[tri[1]];
  const Point& c = nodes[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Location Mesh::locate(Point p) const {
  constexpr double slack = 1e-12;
  if (p.x < -slack || p.x > 1.0 + slack || p.y < -slack || p.y > 1.0 + slack) {
    throw GeometryError("point outside the unit square");
  }
  const int n = subdivisions;
  const double sx = std::clamp(p.x, 0.0, 1.0) * n;
  const double sy = std::clamp(p.y, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(std::floor(sx)), n - 1);
  const int j = std::min(static_cast<int>(std::floor(sy)), n - 1);
  const double xi = sx - i;
  const double eta = sy - j;
  Location loc;
  const int cell = 2 * (j * n + i);
  if (xi >= eta) {
    // (v00, v10, v11)
    loc.triangle = cell;
    loc.weights = {1.0 - xi, xi - eta, eta};
  } else {
    // (v00, v11, v01)
    loc.triangle = cell + 1;
    loc.weights = {1.0 - eta, xi, eta - xi};
  }
  return loc;
}

double Mesh::evaluate(const Vector& field, Point p) const {
  const Location loc = locate(p);
  const auto& tri = triangles[loc.triangle];
  return loc.weights[0] * field[tri[0]] + loc.weights[1] * field[tri[1]] +
         loc.weights[2] * field[tri[2]];
}

}  // namespace nirb
