#include "nscahn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace nscahn {

void SchemeParams::validate() const {
    if (!(eps >= 0.0) || !(eps <= 1.0))
        throw std::invalid_argument("SchemeParams: need 0 <= eps <= 1");
    if (!(dt > 0.0) || !(dt_min > 0.0) || !(dt_min <= dt) || !(dt <= dt_max))
        throw std::invalid_argument("SchemeParams: need 0 < dt_min <= dt <= dt_max");
    if (!(newton_tol > 0.0) || newton_max_iter < 1 || !(lin_tol > 0.0) || lin_max_iter < 1)
        throw std::invalid_argument("SchemeParams: bad solver tolerances");
}

void rho_step_residual(std::span<const double> rho_new, std::span<const double> rho_old,
                       std::span<const double> mu_old, double dt,
                       const PotentialConfig& cfg, const Grid& grid,
                       std::span<double> out) {
    const int n = grid.n_nodes();
    grid.stiff_bulk.multiply(rho_new, out);
    std::vector<double> As(static_cast<std::size_t>(n));
    grid.stiff_surf.multiply(rho_new, As);

    for (int i = 0; i < n; ++i) {
        const double w = grid.bulk_weights[i];
        const double ws = grid.surface_weight[i];
        const double mass = (w + ws) * (rho_new[i] - rho_old[i]) / dt;

        const SplitValue s_new = convex_smooth_split(rho_new[i], cfg, Side::bulk);
        const SplitValue s_old = convex_smooth_split(rho_old[i], cfg, Side::bulk);
        const double gp_old = eval_g(rho_old[i], cfg).d1;

        double r = mass + out[i] + As[i] + w * s_new.beta1 -
                   w * (mu_old[i] * gp_old - s_old.pi1);
        if (ws > 0.0) {
            const SplitValue t_new = convex_smooth_split(rho_new[i], cfg, Side::surface);
            const SplitValue t_old = convex_smooth_split(rho_old[i], cfg, Side::surface);
            r += ws * t_new.beta1 + ws * t_old.pi1;
        }
        out[i] = r;
    }
}

double weighted_residual_norm(std::span<const double> residual, const Grid& grid) {
    double s = 0.0;
    for (int i = 0; i < grid.n_nodes(); ++i) {
        const double w = grid.bulk_weights[i] + grid.surface_weight[i];
        s += residual[i] * residual[i] / w;
    }
    return std::sqrt(s);
}

namespace {

void clamp_interior(std::vector<double>& rho, double clip) {
    const double lim = 1.0 - clip;
    for (double& r : rho) r = std::clamp(r, -lim, lim);
}

} // namespace

RhoSolveResult solve_rho_implicit(const FieldState& state, std::span<const double> mu_frozen,
                                  double dt, const SchemeParams& params,
                                  const PotentialConfig& cfg, const Grid& grid) {
    const int n = grid.n_nodes();
    RhoSolveResult result;
    result.rho = state.rho;
    clamp_interior(result.rho, cfg.clip_margin);

    std::vector<double> residual(static_cast<std::size_t>(n));
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> neg_r(static_cast<std::size_t>(n));
    std::vector<double> trial(static_cast<std::size_t>(n));

    const SparseMatrix stiffness = grid.stiff_bulk.plus(grid.stiff_surf);

    rho_step_residual(result.rho, state.rho, mu_frozen, dt, cfg, grid, residual);
    double res_norm = weighted_residual_norm(residual, grid);

    for (int iter = 1; iter <= params.newton_max_iter; ++iter) {
        result.newton_iters = iter;
        if (res_norm <= params.newton_tol) {
            result.converged = true;
            result.residual_norm = res_norm;
            return result;
        }

        // J = (mass + surface mass)/dt + stiffness + convex curvature
        for (int i = 0; i < n; ++i) {
            const double w = grid.bulk_weights[i];
            const double ws = grid.surface_weight[i];
            double d = (w + ws) / dt + w * convex_smooth_split(result.rho[i], cfg, Side::bulk).beta2;
            if (ws > 0.0)
                d += ws * convex_smooth_split(result.rho[i], cfg, Side::surface).beta2;
            diag[i] = d;
        }
        SparseMatrix J = stiffness;
        J.add_to_diagonal(diag);

        for (int i = 0; i < n; ++i) neg_r[i] = -residual[i];
        SolveReport lin;
        const std::vector<double> delta =
            cg_solve(J, neg_r, params.lin_tol, params.lin_max_iter, lin);
        if (!lin.converged && !(lin.rel_residual < 1e-6)) {
            result.converged = false;
            result.residual_norm = res_norm;
            return result;
        }

        // Damped line search: halve until the residual decreases. Iterates
        // are clamped interior before beta' is evaluated.
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            for (int i = 0; i < n; ++i) trial[i] = result.rho[i] + lambda * delta[i];
            clamp_interior(trial, cfg.clip_margin);
            rho_step_residual(trial, state.rho, mu_frozen, dt, cfg, grid, residual);
            const double trial_norm = weighted_residual_norm(residual, grid);
            if (trial_norm < res_norm || trial_norm <= params.newton_tol) {
                result.rho = trial;
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            result.converged = false;
            result.residual_norm = res_norm;
            return result;
        }
    }

    result.converged = res_norm <= params.newton_tol;
    result.residual_norm = res_norm;
    return result;
}

MuSolveResult solve_mu_linear(const FieldState& state, std::span<const double> rho_next,
                              double dt, const SchemeParams& params,
                              const PotentialConfig& cfg, const Grid& grid) {
    const int n = grid.n_nodes();
    MuSolveResult result;

    constexpr double kGuard = 1e-12;
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto g = eval_g(state.rho[i], cfg);
        const double coeff_old = params.eps + 2.0 * g.value;
        const double reaction = coeff_old + g.d1 * (rho_next[i] - state.rho[i]);
        if (params.positivity_guard && reaction <= kGuard) {
            result.rejected = true;
            return result;
        }
        const double w = grid.bulk_weights[i];
        diag[i] = w * reaction / dt;
        rhs[i] = w * coeff_old / dt * state.mu[i];
    }

    SparseMatrix A = grid.stiff_bulk;
    A.add_to_diagonal(diag);
    result.mu = cg_solve(A, rhs, params.lin_tol, params.lin_max_iter, result.report, state.mu);
    if (!result.report.converged) result.rejected = true;
    return result;
}

StepOutcome step(const FieldState& state, double dt_try, const SchemeParams& params,
                 const PotentialConfig& cfg, const Grid& grid,
                 const SeparationBounds& bounds) {
    StepOutcome outcome;
    double dt = dt_try;

    for (;;) {
        const RhoSolveResult rho_solve =
            solve_rho_implicit(state, state.mu, dt, params, cfg, grid);
        bool ok = rho_solve.converged;
        MuSolveResult mu_solve;
        if (ok) {
            mu_solve = solve_mu_linear(state, rho_solve.rho, dt, params, cfg, grid);
            ok = !mu_solve.rejected;
        }

        if (ok) {
            outcome.next_state.t = state.t + dt;
            outcome.next_state.rho = rho_solve.rho;
            outcome.next_state.mu = std::move(mu_solve.mu);
            outcome.dt_used = dt;
            outcome.dt_next = std::min(dt * 1.2, params.dt_max);
            outcome.newton_iters = rho_solve.newton_iters;
            outcome.mu_report = mu_solve.report;

            constexpr double kTol = 1e-6;
            double min_rho = 1.0, max_rho = -1.0, min_mu = 0.0;
            for (int i = 0; i < grid.n_nodes(); ++i) {
                min_rho = std::min(min_rho, outcome.next_state.rho[i]);
                max_rho = std::max(max_rho, outcome.next_state.rho[i]);
                min_mu = std::min(min_mu, outcome.next_state.mu[i]);
            }
            outcome.flags.separation_violated =
                min_rho < bounds.rho_lo - kTol || max_rho > bounds.rho_hi + kTol;
            outcome.flags.positivity_violated = min_mu < -kTol;
            if (!(min_rho > -1.0) || !(max_rho < 1.0))
                throw SolverHardFailure("step: rho left (-1, 1)");
            return outcome;
        }

        outcome.had_rejection = true;
        if (dt <= params.dt_min) {
            std::ostringstream oss;
            oss << "step: persistent rejection at dt_min (t = " << state.t
                << ", dt = " << dt << ", newton residual stuck)";
            throw SolverHardFailure(oss.str());
        }
        dt = std::max(0.5 * dt, params.dt_min);
        if (dt <= params.dt_min) outcome.flags.dt_floored = true;
    }
}

FieldState simulate(const FieldState& initial, double t_end, const SchemeParams& params,
                    const PotentialConfig& cfg, const Grid& grid,
                    const DiagnosticsSink& sink) {
    params.validate();
    cfg.validate();
    initial.validate(grid);
    if (!(t_end >= initial.t)) throw std::invalid_argument("simulate: t_end < initial time");
    for (double m : initial.mu)
        if (m < 0.0) throw std::invalid_argument("simulate: mu0 must be nonnegative");

    double rho_min = 1.0, rho_max = -1.0;
    for (double r : initial.rho) {
        rho_min = std::min(rho_min, r);
        rho_max = std::max(rho_max, r);
    }
    const SeparationBounds bounds = separation_bounds(cfg, rho_min, rho_max);

    FieldState state = initial;
    DiagAccumulator accum;

    if (sink) {
        DiagnosticsRecord rec = record(state, state, 0.0, cfg, grid, params.eps, accum);
        rec.flags = check_separation_positivity(rec, bounds);
        sink(rec, state);
    }

    double dt_cur = params.dt;
    const double t_eps = 1e-14 * std::max(1.0, std::abs(t_end));
    while (state.t < t_end - t_eps) {
        const double remaining = t_end - state.t;
        const bool fragment = remaining < dt_cur;
        const double dt_try = fragment ? remaining : dt_cur;

        StepOutcome out = step(state, dt_try, params, cfg, grid, bounds);

        if (sink) {
            DiagnosticsRecord rec =
                record(state, out.next_state, out.dt_used, cfg, grid, params.eps, accum);
            rec.newton_iters = out.newton_iters;
            rec.flags = check_separation_positivity(rec, bounds);
            rec.flags.dt_floored = out.flags.dt_floored;
            sink(rec, out.next_state);
        }

        state = std::move(out.next_state);
        if (fragment && !out.had_rejection) {
            // keep the cruising step size; the clamp only served to land on t_end
        } else {
            dt_cur = out.dt_next;
        }
    }
    return state;
}

EpsSweepReport sweep_epsilon(const FieldState& initial, double t_end,
                             std::span<const double> eps_list, const SchemeParams& params,
                             const PotentialConfig& cfg, const Grid& grid) {
    if (eps_list.empty() || eps_list.back() != 0.0)
        throw std::invalid_argument("sweep_epsilon: eps list must end with 0");
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw std::invalid_argument("sweep_epsilon: eps list must be sorted descending");

    EpsSweepReport report;
    report.t_end = t_end;
    report.eps.assign(eps_list.begin(), eps_list.end());

    SchemeParams p0 = params;
    p0.eps = 0.0;
    const FieldState limit = simulate(initial, t_end, p0, cfg, grid);

    for (double eps : eps_list) {
        SchemeParams p = params;
        p.eps = eps;
        const FieldState end = eps == 0.0 ? limit : simulate(initial, t_end, p, cfg, grid);
        std::vector<double> diff_rho(end.rho.size()), diff_mu(end.mu.size());
        for (std::size_t i = 0; i < end.rho.size(); ++i) {
            diff_rho[i] = end.rho[i] - limit.rho[i];
            diff_mu[i] = end.mu[i] - limit.mu[i];
        }
        const double d = std::sqrt(weighted_inner(diff_rho, diff_rho, grid, Domain::bulk)) +
                         std::sqrt(weighted_inner(diff_mu, diff_mu, grid, Domain::bulk));
        report.d.push_back(d);
    }

    for (std::size_t i = 0; i + 2 < report.d.size(); ++i)
        report.ratios.push_back(report.d[i + 1] / report.d[i]);
    return report;
}

} // namespace nscahn
