#pragma once

#include <span>
#include <vector>

#include "nscahn/dynamics.hpp"
#include "nscahn/mesh.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

struct StationaryResult {
    double mu_s = 0.0;
    std::vector<double> rho_s; // trace on boundary nodes implied by node sharing
    double residual_norm = 0.0;
    int iterations = 0; // residual evaluations, including the accepting one
    bool converged = false;
    std::vector<double> residual_history;
};

/// Weighted residual of the stationary system at rho:
///   R_i = (A rho)_i + w_i F'(rho_i) + wG_i F_Gamma'(rho_i) - w_i mu_s g'(rho_i).
void stationary_residual(std::span<const double> rho, double mu_s,
                         const PotentialConfig& cfg, const Grid& grid,
                         std::span<double> out);

/// Damped Newton on the stationary system for a given constant mu_s. The
/// Jacobian is used unshifted first; when conjugate gradients detects
/// nonpositive curvature, the diagonal is lifted by
/// max(0, C_lower - min F''(rho_i)) + 1e-8 (times the nodal weight) and the
/// iteration retried. Iterates are clamped interior as in the dynamics.
StationaryResult solve_stationary(double mu_s, std::span<const double> rho_guess,
                                  const PotentialConfig& cfg, const Grid& grid,
                                  double tol, int max_iter);

struct OmegaLimitReport {
    double t_end = 0.0;
    double grad_mu_norm = 0.0;         // ||grad mu|| at t_end
    double rho_increment_rate = 0.0;   // last step increment norm / dt
    double mu_s_extracted = 0.0;       // bulk-weighted mean of mu(t_end)
    double mu_spatial_variation = 0.0; // ||mu(t_end) - mu_s||_L2
    double distance_to_stationary = 0.0; // L2 between rho(t_end) and the Newton solution
    int stationary_iterations = 0;
    bool stationary_converged = false;
    StationaryResult stationary;
    FieldState final_state;
};

/// Runs the dynamics to t_end, extracts the constant chemical potential from
/// the endpoint, seeds the stationary Newton solve from rho(t_end) and
/// reports how close the trajectory endpoint is to an exact stationary
/// solution.
OmegaLimitReport omega_limit_study(const FieldState& initial, double t_end,
                                   const SchemeParams& params, const PotentialConfig& cfg,
                                   const Grid& grid);

} // namespace nscahn
