#include "nscahn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nscahn {

namespace {

double coupling_integral(const FieldState& s, const PotentialConfig& cfg, const Grid& grid,
                         double eps) {
    double c = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i)
        c += grid.bulk_weights[i] * (eps + 2.0 * eval_g(s.rho[i], cfg).value) * s.mu[i];
    return c;
}

double mu_energy_integral(const FieldState& s, const PotentialConfig& cfg, const Grid& grid,
                          double eps) {
    double c = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i)
        c += grid.bulk_weights[i] * (0.5 * eps + eval_g(s.rho[i], cfg).value) * s.mu[i] *
             s.mu[i];
    return c;
}

} // namespace

DiagnosticsRecord record(const FieldState& prev, const FieldState& next, double dt,
                         const PotentialConfig& cfg, const Grid& grid, double eps,
                         DiagAccumulator& accum) {
    DiagnosticsRecord rec;
    rec.t = next.t;
    rec.dt_used = dt;
    rec.energy = discrete_energy(next, cfg, grid);
    rec.coupling_term = coupling_integral(next, cfg, grid, eps);
    rec.lyapunov = rec.energy.total - rec.coupling_term;

    if (dt > 0.0) {
        // Left-endpoint rectangle rule for the dissipation integrals.
        accum.grad_mu_sq += dt * gradient_form_bulk(prev.mu, prev.mu, grid);

        std::vector<double> rate(next.rho.size());
        for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = (next.rho[i] - prev.rho[i]) / dt;
        const double bulk_sq = weighted_inner(rate, rate, grid, Domain::bulk);
        const double surf_sq = weighted_inner(rate, rate, grid, Domain::boundary);
        accum.dtrho_sq += dt * bulk_sq;
        accum.dtrho_surf_sq += dt * surf_sq;
        rec.rho_increment_rate = std::sqrt(bulk_sq + surf_sq);

        // Defect of the per-step rearrangement identity:
        //   int (eps+2g(rho_next)) mu_next - int (eps+2g(rho_prev)) mu_prev
        //     = int mu_next g'(rho_prev) (rho_next - rho_prev) + O(dt^2).
        double transfer = 0.0;
        for (int i = 0; i < grid.n_nodes(); ++i)
            transfer += grid.bulk_weights[i] * next.mu[i] * eval_g(prev.rho[i], cfg).d1 *
                        (next.rho[i] - prev.rho[i]);
        rec.rearrangement_defect = rec.coupling_term -
                                   coupling_integral(prev, cfg, grid, eps) - transfer;
    }

    rec.first_estimate_q = mu_energy_integral(next, cfg, grid, eps) + accum.grad_mu_sq;
    rec.grad_mu_norm = std::sqrt(std::max(0.0, gradient_form_bulk(next.mu, next.mu, grid)));

    rec.min_rho = *std::min_element(next.rho.begin(), next.rho.end());
    rec.max_rho = *std::max_element(next.rho.begin(), next.rho.end());
    rec.min_mu = *std::min_element(next.mu.begin(), next.mu.end());
    return rec;
}

ViolationFlags check_separation_positivity(const DiagnosticsRecord& rec,
                                           const SeparationBounds& bounds) {
    if (!(rec.min_rho > -1.0) || !(rec.max_rho < 1.0))
        throw std::runtime_error("check_separation_positivity: rho left (-1, 1)");
    ViolationFlags flags;
    flags.separation_violated =
        rec.min_rho < bounds.rho_lo - 1e-3 || rec.max_rho > bounds.rho_hi + 1e-3;
    flags.positivity_violated = rec.min_mu < -1e-10;
    return flags;
}

std::pair<double, double> stationarity_residuals(const DiagnosticsRecord& rec) {
    return {rec.grad_mu_norm, rec.rho_increment_rate};
}

} // namespace nscahn
