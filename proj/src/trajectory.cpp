#include "nirb/trajectory.hpp"

#include <cmath>
#include <string>

namespace nirb {

TimeGrid TimeGrid::with_step(double final_time, double dt) {
  if (!(final_time > 0.0) || !(dt > 0.0)) throw InvalidArgument("time grid needs T > 0 and dt > 0");
  TimeGrid g;
  g.final_time = final_time;
  g.steps = std::max(1, static_cast<int>(std::lround(final_time / dt)));
  return g;
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
  return a.steps == b.steps && std::abs(a.final_time - b.final_time) <= 1e-12 * std::max(1.0, a.final_time);
}

Trajectory::Trajectory(TimeGrid g, Eigen::Index size) : grid(g), fields(g.levels(), Vector::Zero(size)) {}

void check_aligned(const Trajectory& a, const Trajectory& b, const char* what) {
  if (!same_grid(a.grid, b.grid) || a.levels() != b.levels() || a.field_size() != b.field_size()) {
    throw InvalidArgument(std::string(what) + ": trajectories are not aligned");
  }
}

}  // namespace nirb
