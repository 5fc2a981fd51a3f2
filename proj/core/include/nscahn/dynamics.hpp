#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nscahn/diagnostics.hpp"
#include "nscahn/linsolve.hpp"
#include "nscahn/mesh.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

struct SchemeParams {
    double eps = 0.05; // viscosity coefficient, 0 <= eps <= 1
    double dt = 1e-3;
    double dt_min = 1e-8;
    double dt_max = 1e-1;
    double newton_tol = 1e-10; // weighted residual norm
    int newton_max_iter = 50;
    double lin_tol = 1e-10;
    int lin_max_iter = 20000;
    bool positivity_guard = true;

    void validate() const;
};

struct StepFlags {
    bool positivity_violated = false;
    bool separation_violated = false;
    bool dt_floored = false;
};

struct StepOutcome {
    FieldState next_state;
    double dt_used = 0.0;
    double dt_next = 0.0; // suggestion for the following step
    int newton_iters = 0;
    SolveReport mu_report;
    StepFlags flags;
    bool had_rejection = false;
};

/// Weighted residual of the backward-Euler rho-step at the point rho_new,
/// with the convex part implicit and the smooth part plus the mu g'(rho)
/// source frozen at (rho_old, mu_old):
///   R_i = (w_i + wG_i)(rho_new - rho_old)_i / dt + (A rho_new)_i
///       + w_i beta'(rho_new_i) + wG_i betaG'(rho_new_i)
///       - w_i (mu_old_i g'(rho_old_i) - pi'(rho_old_i)) + wG_i piG'(rho_old_i).
/// Entries are "dual" vectors (already weight-multiplied).
void rho_step_residual(std::span<const double> rho_new, std::span<const double> rho_old,
                       std::span<const double> mu_old, double dt,
                       const PotentialConfig& cfg, const Grid& grid,
                       std::span<double> out);

/// Mesh-consistent norm of a weight-multiplied residual vector:
/// sqrt(sum R_i^2 / (w_i + wG_i)).
double weighted_residual_norm(std::span<const double> residual, const Grid& grid);

struct RhoSolveResult {
    std::vector<double> rho;
    int newton_iters = 0; // residual evaluations, including the accepting one
    bool converged = false;
    double residual_norm = 0.0;
};

/// Damped interior-point Newton on the rho-step. Iterates are clamped to
/// [-1 + clip_margin, 1 - clip_margin] before evaluating the singular beta';
/// the accepted point meets the tolerance unclamped. Non-convergence is a
/// rejection signal, not an error.
RhoSolveResult solve_rho_implicit(const FieldState& state, std::span<const double> mu_frozen,
                                  double dt, const SchemeParams& params,
                                  const PotentialConfig& cfg, const Grid& grid);

struct MuSolveResult {
    std::vector<double> mu;
    SolveReport report;
    bool rejected = false; // positivity guard tripped (dt too large)
};

/// Linear backward-Euler mu-step with frozen coefficient and implicit
/// reaction:
///   [(eps + 2 g(rho_old) + g'(rho_old)(rho_new - rho_old)) / dt] mu_new
///     - Lap mu_new = (eps + 2 g(rho_old)) / dt mu_old.
/// The assembled matrix is an M-matrix; with mu_old >= 0 the solution stays
/// nonnegative up to solver tolerance.
MuSolveResult solve_mu_linear(const FieldState& state, std::span<const double> rho_next,
                              double dt, const SchemeParams& params,
                              const PotentialConfig& cfg, const Grid& grid);

/// Thrown when dt_min is reached with persistent rejection.
struct SolverHardFailure : std::runtime_error {
    explicit SolverHardFailure(const std::string& what) : std::runtime_error(what) {}
};

/// One rho-then-mu step from state with initial step size dt_try; halves on
/// rejection (not below dt_min), grows the suggestion by 1.2 toward dt_max on
/// success. Separation/positivity flags are checked against `bounds` with
/// tolerance 1e-6 without aborting.
StepOutcome step(const FieldState& state, double dt_try, const SchemeParams& params,
                 const PotentialConfig& cfg, const Grid& grid,
                 const SeparationBounds& bounds);

using DiagnosticsSink = std::function<void(const DiagnosticsRecord&, const FieldState&)>;

/// Advances to t_end, emitting one record per accepted step (plus the initial
/// one at t = 0). Deterministic for identical inputs. Requires mu0 >= 0
/// nodewise and rho0 strictly interior.
FieldState simulate(const FieldState& initial, double t_end, const SchemeParams& params,
                    const PotentialConfig& cfg, const Grid& grid,
                    const DiagnosticsSink& sink = {});

struct EpsSweepReport {
    std::vector<double> eps;
    std::vector<double> d;      // d(eps) = ||rho_eps - rho_0||_L2 + ||mu_eps - mu_0||_L2 at t_end
    std::vector<double> ratios; // successive ratios over the nonzero entries
    double t_end = 0.0;
};

/// Vanishing-viscosity sweep: runs simulate for each eps (sorted descending,
/// last entry 0) from the same initial data and reports distances to the
/// eps = 0 trajectory at t_end.
EpsSweepReport sweep_epsilon(const FieldState& initial, double t_end,
                             std::span<const double> eps_list, const SchemeParams& params,
                             const PotentialConfig& cfg, const Grid& grid);

} // namespace nscahn
