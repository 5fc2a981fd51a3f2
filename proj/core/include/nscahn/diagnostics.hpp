#pragma once

#include <utility>

#include "nscahn/mesh.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

struct ViolationFlags {
    bool positivity_violated = false;
    bool separation_violated = false;
    bool dt_floored = false;

    unsigned bitmask() const {
        return (positivity_violated ? 1u : 0u) | (separation_violated ? 2u : 0u) |
               (dt_floored ? 4u : 0u);
    }
    bool any() const { return positivity_violated || separation_violated || dt_floored; }
};

/// Running dissipation integrals of one trajectory, accumulated with the
/// left-endpoint rectangle rule in time.
struct DiagAccumulator {
    double grad_mu_sq = 0.0;   // int_0^t int |grad mu|^2
    double dtrho_sq = 0.0;     // int_0^t int |dt rho|^2
    double dtrho_surf_sq = 0.0;
};

/// Per-step monitor of the discrete analogues of the model's identities.
struct DiagnosticsRecord {
    double t = 0.0;
    double dt_used = 0.0;
    EnergyBreakdown energy;
    double coupling_term = 0.0;     // int (eps + 2 g(rho)) mu
    double lyapunov = 0.0;          // E_total - coupling_term
    double first_estimate_q = 0.0;  // int (eps/2 + g(rho)) mu^2 + accumulated dissipation
    double grad_mu_norm = 0.0;      // L2 norm of grad mu
    double rho_increment_rate = 0.0; // ||rho step increment|| / dt, bulk + surface
    double min_rho = 0.0;
    double max_rho = 0.0;
    double min_mu = 0.0;
    int newton_iters = 0;
    ViolationFlags flags;
    /// Step defect of the coupling-term rearrangement identity
    ///   d/dt int (eps + 2 g(rho)) mu = int mu g'(rho) dt_rho
    /// (O(dt^2) per step on smooth runs). Not part of the CSV schema.
    double rearrangement_defect = 0.0;
};

/// Computes all record fields for the transition prev -> next and advances
/// the accumulator. dt = 0 produces the initial record (rates zero, nothing
/// accumulated).
DiagnosticsRecord record(const FieldState& prev, const FieldState& next, double dt,
                         const PotentialConfig& cfg, const Grid& grid, double eps,
                         DiagAccumulator& accum);

/// separation: violated beyond 1e-3 of [rho_lo, rho_hi]; positivity: violated
/// below -1e-10. Throws std::runtime_error if rho left (-1, 1): that is a
/// hard interior violation.
ViolationFlags check_separation_positivity(const DiagnosticsRecord& rec,
                                           const SeparationBounds& bounds);

/// (||grad mu||, rho increment rate): the pair whose vanishing characterizes
/// approach to stationarity.
std::pair<double, double> stationarity_residuals(const DiagnosticsRecord& rec);

} // namespace nscahn
