#pragma once

#include "nirb/types.hpp"

#include <vector>

namespace nirb {

/// Uniform time grid on [0, T].
struct TimeGrid {
  double final_time = 1.0;
  int steps = 1;

  double dt() const { return final_time / steps; }
  double time(int level) const { return final_time * level / steps; }
  int levels() const { return steps + 1; }

  /// Grid whose step is the closest divisor of T to the requested step.
  static TimeGrid with_step(double final_time, double dt);
};

bool same_grid(const TimeGrid& a, const TimeGrid& b);

/// Nodal fields at every level of a time grid (t = 0 included).
struct Trajectory {
  TimeGrid grid;
  std::vector<Vector> fields;

  Trajectory() = default;
  Trajectory(TimeGrid g, Eigen::Index size);

  int levels() const { return static_cast<int>(fields.size()); }
  Eigen::Index field_size() const { return fields.empty() ? 0 : fields.front().size(); }
};

void check_aligned(const Trajectory& a, const Trajectory& b, const char* what);

}  // namespace nirb
