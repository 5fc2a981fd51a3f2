#include "nscahn/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nscahn {

void stationary_residual(std::span<const double> rho, double mu_s,
                         const PotentialConfig& cfg, const Grid& grid,
                         std::span<double> out) {
    const int n = grid.n_nodes();
    grid.stiff_bulk.multiply(rho, out);
    std::vector<double> As(static_cast<std::size_t>(n));
    grid.stiff_surf.multiply(rho, As);
    for (int i = 0; i < n; ++i) {
        const double w = grid.bulk_weights[i];
        const double ws = grid.surface_weight[i];
        double r = out[i] + As[i] + w * eval_F(rho[i], cfg, Side::bulk).d1 -
                   w * mu_s * eval_g(rho[i], cfg).d1;
        if (ws > 0.0) r += ws * eval_F(rho[i], cfg, Side::surface).d1;
        out[i] = r;
    }
}

namespace {

void clamp_interior(std::vector<double>& rho, double clip) {
    const double lim = 1.0 - clip;
    for (double& r : rho) r = std::clamp(r, -lim, lim);
}

} // namespace

StationaryResult solve_stationary(double mu_s, std::span<const double> rho_guess,
                                  const PotentialConfig& cfg, const Grid& grid,
                                  double tol, int max_iter) {
    const int n = grid.n_nodes();
    StationaryResult result;
    result.mu_s = mu_s;
    result.rho_s.assign(rho_guess.begin(), rho_guess.end());
    clamp_interior(result.rho_s, cfg.clip_margin);

    const double C_lower = check_hypotheses(cfg).C_lower;
    const SparseMatrix stiffness = grid.stiff_bulk.plus(grid.stiff_surf);

    std::vector<double> residual(static_cast<std::size_t>(n));
    std::vector<double> neg_r(static_cast<std::size_t>(n));
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> trial(static_cast<std::size_t>(n));

    stationary_residual(result.rho_s, mu_s, cfg, grid, residual);
    double res_norm = weighted_residual_norm(residual, grid);
    result.residual_history.push_back(res_norm);

    for (int iter = 1; iter <= max_iter; ++iter) {
        result.iterations = iter;
        if (res_norm <= tol) {
            result.converged = true;
            result.residual_norm = res_norm;
            return result;
        }

        double min_curv = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double w = grid.bulk_weights[i];
            const double ws = grid.surface_weight[i];
            const auto F = eval_F(result.rho_s[i], cfg, Side::bulk);
            const auto g = eval_g(result.rho_s[i], cfg);
            double d = w * (F.d2 - mu_s * g.d2);
            min_curv = std::min(min_curv, F.d2);
            if (ws > 0.0) {
                const auto FG = eval_F(result.rho_s[i], cfg, Side::surface);
                d += ws * FG.d2;
                min_curv = std::min(min_curv, FG.d2);
            }
            diag[i] = d;
        }

        for (int i = 0; i < n; ++i) neg_r[i] = -residual[i];

        SparseMatrix J = stiffness;
        J.add_to_diagonal(diag);
        SolveReport lin;
        std::vector<double> delta;
        bool usable = true;
        const bool diag_ok = [&] {
            for (int i = 0; i < n; ++i)
                if (J.coeff(i, i) <= 0.0) return false;
            return true;
        }();
        if (diag_ok) {
            delta = cg_solve(J, neg_r, 1e-12, 50 * n + 200, lin);
            usable = !lin.indefinite && (lin.converged || lin.rel_residual < 1e-6);
        } else {
            usable = false;
        }
        if (!usable) {
            // Indefinite Jacobian: lift the diagonal per the lower curvature
            // bound F'' >= -C_lower and retry.
            const double shift = std::max(0.0, C_lower - min_curv) + 1e-8;
            SparseMatrix Js = stiffness;
            std::vector<double> diag_s = diag;
            for (int i = 0; i < n; ++i)
                diag_s[i] += shift * (grid.bulk_weights[i] + grid.surface_weight[i]);
            Js.add_to_diagonal(diag_s);
            delta = cg_solve(Js, neg_r, 1e-12, 50 * n + 200, lin);
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (int i = 0; i < n; ++i) trial[i] = result.rho_s[i] + lambda * delta[i];
            clamp_interior(trial, cfg.clip_margin);
            stationary_residual(trial, mu_s, cfg, grid, residual);
            const double trial_norm = weighted_residual_norm(residual, grid);
            if (trial_norm < res_norm || trial_norm <= tol) {
                result.rho_s = trial;
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        result.residual_history.push_back(res_norm);
        if (!accepted) break;
    }

    result.converged = res_norm <= tol;
    result.residual_norm = res_norm;
    return result;
}

OmegaLimitReport omega_limit_study(const FieldState& initial, double t_end,
                                   const SchemeParams& params, const PotentialConfig& cfg,
                                   const Grid& grid) {
    OmegaLimitReport report;
    report.t_end = t_end;

    DiagnosticsRecord last{};
    const FieldState end =
        simulate(initial, t_end, params, cfg, grid,
                 [&last](const DiagnosticsRecord& rec, const FieldState&) { last = rec; });
    report.final_state = end;
    report.grad_mu_norm = last.grad_mu_norm;
    report.rho_increment_rate = last.rho_increment_rate;

    double mean = 0.0, volume = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        mean += grid.bulk_weights[i] * end.mu[i];
        volume += grid.bulk_weights[i];
    }
    report.mu_s_extracted = mean / volume;

    std::vector<double> dev(end.mu.size());
    for (std::size_t i = 0; i < dev.size(); ++i) dev[i] = end.mu[i] - report.mu_s_extracted;
    report.mu_spatial_variation = std::sqrt(weighted_inner(dev, dev, grid, Domain::bulk));

    report.stationary = solve_stationary(report.mu_s_extracted, end.rho, cfg, grid,
                                         params.newton_tol, params.newton_max_iter);
    report.stationary_iterations = report.stationary.iterations;
    report.stationary_converged = report.stationary.converged;

    std::vector<double> diff(end.rho.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = end.rho[i] - report.stationary.rho_s[i];
    report.distance_to_stationary = std::sqrt(weighted_inner(diff, diff, grid, Domain::bulk));
    return report;
}

} // namespace nscahn
