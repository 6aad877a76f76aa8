#include "nirb/transfer.hpp"

namespace nirb {

SpMat interpolation_matrix(const Mesh& from, const Mesh& to) {
  std::vector<Triplet> entries;
  entries.reserve(3 * to.nodes.size());
  for (int i = 0; i < to.node_count(); ++i) {
    const Location loc = from.locate(to.nodes[i]);
    const auto& tri = from.triangles[loc.triangle];
    for (int k = 0; k < 3; ++k) {
      if (std::abs(loc.weights[k]) > 1e-13) entries.emplace_back(i, tri[k], loc.weights[k]);
    }
  }
  SpMat p(to.node_count(), from.node_count());
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

Vector interpolate_space(const Vector& field, const Mesh& from, const Mesh& to) {
  if (field.size() != from.node_count()) throw InvalidArgument("interpolate_space: field size mismatch");
  return interpolation_matrix(from, to) * field;
}

}  // namespace nirb
