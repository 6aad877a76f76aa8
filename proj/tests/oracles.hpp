#pragma once

// Independent checks shared by the unit tests and the acceptance binary.
// Each returns the measured discrepancy; callers compare with their tolerance.

namespace oracles {

/// max_n ‖Ψ^n - FD^n‖_H1 / max_n ‖Ψ^n‖_H1, central differences in μ.
double heat_sensitivity_fd(bool coarse_scheme);
/// |dF/dμ(adjoint) - FD| / |FD|, backward Euler.
double heat_gradient_fd();
/// Worst relative tangent mismatch over a, b, alpha and both schemes.
double brusselator_tangent_fd();
/// Worst relative mismatch of dF/dp (adjoint) against FD over a, b, alpha.
double brusselator_gradient_fd();
/// max |GP mean - y| / max |y| at the training inputs with a tiny noise variance.
double gp_interpolation();
/// ‖R^n - I‖ when coarse and fine coefficient tables coincide, δ = 1e-12.
double rectification_identity();
/// ‖δR^n - (AᵀB)ᵀ‖ / ‖AᵀB‖ for δ = 1e8.
double rectification_tikhonov_limit();
/// Error of quadratic time interpolation on a field quadratic in t.
double quadratic_interpolation();
/// max(‖ΦᵀMΦ - I‖, off-diagonal of ΦᵀKΦ relative to its diagonal) after H1 rotation.
double basis_orthogonality();

}  // namespace oracles
