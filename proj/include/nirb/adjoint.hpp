#pragma once

#include "nirb/heat.hpp"

#include <cstdint>

namespace nirb {

/// ½ Σ_n ‖u^n - ū^n‖²_{L2}; measurements already live on the state's mesh and grid.
double objective(const Trajectory& state, const Trajectory& measurements, const FemOperators& ops);

/// Backward Euler dual march, χ^{N} = 0:
///   (M + Δt μK) χ^{n-1} = M χ^n + Δt M (u^n - ū^n).
Trajectory solve_adjoint_fine(const HeatDiscretization& disc, double mu, const Trajectory& state,
                              const Trajectory& measurements);

/// Crank–Nicolson dual march with the residual averaged over each step.
Trajectory solve_adjoint_coarse(const HeatDiscretization& disc, double mu, const Trajectory& state,
                                const Trajectory& measurements);

/// dF/dμ for the backward Euler state, exact for the discrete objective:
///   -Σ_{n≥1} (χ^{n-1})ᵀ K u^n + (e⁰ + χ⁰/Δt)ᵀ M Ψ⁰,   Ψ⁰ = -u⁰/μ.
double gradient_objective(const FemOperators& ops, double mu, const Trajectory& state, const Trajectory& adjoint,
                          const Trajectory& measurements);

/// Deterministic N(0, σ²) noise for one measurement level, one value per node.
Vector measurement_noise(int nodes, double sigma, std::uint64_t seed, int parameter_id, int level);

}  // namespace nirb
