#pragma once

#include <atomic>

namespace nirb {

// Every coarse (Crank–Nicolson) parabolic solve bumps this counter, so a
// caller can check how many coarse problems an online phase really ran.
inline std::atomic<long>& coarse_solve_counter() {
  static std::atomic<long> counter{0};
  return counter;
}

inline long coarse_solve_count() { return coarse_solve_counter().load(); }
inline void count_coarse_solve() { coarse_solve_counter().fetch_add(1); }

}  // namespace nirb
