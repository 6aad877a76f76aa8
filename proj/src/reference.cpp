#include "nirb/reference.hpp"

#include "nirb/fem.hpp"
#include "nirb/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace nirb {

double CompressedReference::squared_error(int level, const Vector& v) const {
  if (level < 0 || level >= levels()) throw InvalidArgument("reference: level out of range");
  if (v.size() != projections.rows()) throw InvalidArgument("reference: field size does not match the target mesh");
  return energies[level] - 2.0 * v.dot(projections.col(level)) + v.dot(gram * v);
}

double CompressedReference::linf_error(const Trajectory& approx) const {
  if (approx.levels() != levels() || !same_grid(approx.grid, grid())) {
    throw InvalidArgument("reference: approximation is not on the target time grid");
  }
  double worst = 0.0;
  for (int n = 0; n < levels(); ++n) worst = std::max(worst, squared_error(n, approx.fields[n]));
  return std::sqrt(std::max(worst, 0.0));
}

double CompressedReference::linf_norm() const { return std::sqrt(std::max(energies.maxCoeff(), 0.0)); }

ReducedReference reduce_reference(const CompressedReference& ref, const Matrix& modes) {
  if (modes.rows() != ref.projections.rows()) throw InvalidArgument("reference: basis does not match the target mesh");
  ReducedReference out;
  out.projections = ref.projections.transpose() * modes;
  out.gram = modes.transpose() * (ref.gram * modes);
  out.energies = ref.energies;
  out.norm = ref.linf_norm();
  return out;
}

double ReducedReference::linf_error(const Matrix& coefficients) const {
  if (coefficients.rows() != energies.size() || coefficients.cols() != gram.rows()) {
    throw InvalidArgument("reference: coefficient table shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index n = 0; n < coefficients.rows(); ++n) {
    const Vector c = coefficients.row(n).transpose();
    worst = std::max(worst, energies[n] - 2.0 * c.dot(projections.row(n).transpose()) + c.dot(gram * c));
  }
  return std::sqrt(std::max(worst, 0.0));
}

ReferenceCompressor::ReferenceCompressor(const Mesh& ref_mesh, const TimeGrid& ref_grid, const SpMat& ref_gram,
                                         int components, const std::vector<TargetSpec>& targets)
    : ref_grid_(ref_grid), ref_gram_(block_diagonal(ref_gram, components)), components_(components) {
  for (const TargetSpec& ts : targets) {
    Target t;
    const Mesh mesh = build_structured_mesh(ts.subdivisions);
    t.transfer = block_diagonal(interpolation_matrix(mesh, ref_mesh), components);
    t.data.target = ts;
    t.data.components = components;
    t.data.final_time = ref_grid.final_time;
    t.data.projections = Matrix::Zero(t.transfer.cols(), ts.steps + 1);
    t.data.energies = Vector::Zero(ts.steps + 1);
    t.data.gram = SpMat(t.transfer.transpose() * (ref_gram_ * t.transfer));
    const TimeGrid grid{ref_grid.final_time, ts.steps};
    for (int k = 0; k <= ts.steps; ++k) {
      const double s = grid.time(k) / ref_grid.dt();
      int low = static_cast<int>(std::floor(s + 1e-9));
      double theta = s - low;
      if (theta < 1e-9) theta = 0.0;
      if (low >= ref_grid.steps) {
        low = ref_grid.steps;
        theta = 0.0;
      }
      t.samples.push_back({k, low, theta});
    }
    targets_.push_back(std::move(t));
  }
}

void ReferenceCompressor::record(Target& t, int target_level, const Vector& y) {
  const Vector gy = ref_gram_ * y;
  t.data.projections.col(target_level) = t.transfer.transpose() * gy;
  t.data.energies[target_level] = y.dot(gy);
}

void ReferenceCompressor::observe(int level, const Vector& y) {
  if (level != next_level_) throw InvalidArgument("reference: levels must be observed in order");
  if (y.size() != ref_gram_.rows()) throw InvalidArgument("reference: field size mismatch");
  for (Target& t : targets_) {
    for (const Sample& s : t.samples) {
      if (s.theta == 0.0 && s.low == level) {
        record(t, s.target_level, y);
      } else if (s.theta > 0.0 && s.low + 1 == level) {
        record(t, s.target_level, (1.0 - s.theta) * previous_ + s.theta * y);
      }
    }
  }
  previous_ = y;
  ++next_level_;
}

std::vector<CompressedReference> ReferenceCompressor::finish() {
  if (next_level_ != ref_grid_.levels()) throw InvalidArgument("reference: stream ended early");
  std::vector<CompressedReference> out;
  for (Target& t : targets_) out.push_back(std::move(t.data));
  targets_.clear();
  return out;
}

std::vector<int> ReferenceSampler::nearest_levels(const TimeGrid& ref_grid, const TimeGrid& target) {
  std::vector<int> out;
  for (int k = 0; k <= target.steps; ++k) {
    const int j = static_cast<int>(std::lround(target.time(k) / ref_grid.dt()));
    out.push_back(std::clamp(j, 0, ref_grid.steps));
  }
  return out;
}

ReferenceSampler::ReferenceSampler(const Mesh& ref_mesh, const TimeGrid& ref_grid, int components,
                                   const std::vector<TargetSpec>& targets) {
  for (const TargetSpec& ts : targets) {
    Target t;
    t.grid = TimeGrid{ref_grid.final_time, ts.steps};
    const Mesh mesh = build_structured_mesh(ts.subdivisions);
    t.restriction = block_diagonal(interpolation_matrix(ref_mesh, mesh), components);
    t.source_level = nearest_levels(ref_grid, t.grid);
    t.values = Trajectory(t.grid, t.restriction.rows());
    targets_.push_back(std::move(t));
  }
}

void ReferenceSampler::observe(int level, const Vector& y) {
  if (level != next_level_) throw InvalidArgument("reference: levels must be observed in order");
  for (Target& t : targets_) {
    for (size_t k = 0; k < t.source_level.size(); ++k) {
      if (t.source_level[k] == level) t.values.fields[k] = t.restriction * y;
    }
  }
  ++next_level_;
}

std::vector<Trajectory> ReferenceSampler::finish() {
  std::vector<Trajectory> out;
  for (Target& t : targets_) out.push_back(std::move(t.values));
  targets_.clear();
  return out;
}

}  // namespace nirb
