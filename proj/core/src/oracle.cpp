#include "nscahn/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "nscahn/config.hpp"
#include "nscahn/linsolve.hpp"

namespace nscahn {

namespace {

// Trapezoid bulk weight on [0,1], h = 1/(n-1).
double weight(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

double surf_weight(int i, int n) { return (i == 0 || i == n - 1) ? 1.0 : 0.0; }

} // namespace

DenseStepResult dense_step_interval(const std::vector<double>& rho_old,
                                    const std::vector<double>& mu_old, int n_x, double dt,
                                    const SchemeParams& params, const PotentialConfig& cfg) {
    if (n_x < 4) throw std::invalid_argument("dense_step_interval: n_x < 4");
    const int n = n_x;
    const double h = 1.0 / (n - 1);
    const double lim = 1.0 - cfg.clip_margin;

    // Stiffness of sum over edges (u_{i+1} - u_i)(v_{i+1} - v_i)/h.
    std::vector<std::vector<double>> K(n, std::vector<double>(n, 0.0));
    for (int e = 0; e + 1 < n; ++e) {
        K[e][e] += 1.0 / h;
        K[e + 1][e + 1] += 1.0 / h;
        K[e][e + 1] -= 1.0 / h;
        K[e + 1][e] -= 1.0 / h;
    }

    auto residual = [&](const std::vector<double>& rho, std::vector<double>& R) {
        for (int i = 0; i < n; ++i) {
            double stiff = 0.0;
            for (int j = 0; j < n; ++j) stiff += K[i][j] * rho[j];
            const double w = weight(i, n, h);
            const double ws = surf_weight(i, n);
            const auto s_new = convex_smooth_split(rho[i], cfg, Side::bulk);
            const auto s_old = convex_smooth_split(rho_old[i], cfg, Side::bulk);
            const double gp_old = eval_g(rho_old[i], cfg).d1;
            double r = (w + ws) * (rho[i] - rho_old[i]) / dt + stiff + w * s_new.beta1 -
                       w * (mu_old[i] * gp_old - s_old.pi1);
            if (ws > 0.0) {
                const auto t_new = convex_smooth_split(rho[i], cfg, Side::surface);
                const auto t_old = convex_smooth_split(rho_old[i], cfg, Side::surface);
                r += ws * t_new.beta1 + ws * t_old.pi1;
            }
            R[i] = r;
        }
    };

    // Plain dense Newton; the system is strictly convex, so the undamped
    // iteration with an interior clamp converges to the unique solution.
    std::vector<double> rho = rho_old;
    std::vector<double> R(n);
    for (int iter = 0; iter < 200; ++iter) {
        residual(rho, R);
        double norm = 0.0;
        for (int i = 0; i < n; ++i)
            norm += R[i] * R[i] / (weight(i, n, h) + surf_weight(i, n));
        norm = std::sqrt(norm);
        if (norm <= 1e-13) break;

        std::vector<std::vector<double>> J = K;
        for (int i = 0; i < n; ++i) {
            const double w = weight(i, n, h);
            const double ws = surf_weight(i, n);
            J[i][i] += (w + ws) / dt + w * convex_smooth_split(rho[i], cfg, Side::bulk).beta2;
            if (ws > 0.0)
                J[i][i] += ws * convex_smooth_split(rho[i], cfg, Side::surface).beta2;
        }
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -R[i];
        const std::vector<double> delta = dense_solve_oracle(J, rhs);
        for (int i = 0; i < n; ++i) {
            rho[i] += delta[i];
            if (rho[i] > lim) rho[i] = lim;
            if (rho[i] < -lim) rho[i] = -lim;
        }
    }

    // Dense mu step: (w reaction/dt) mu - weighted Laplacian mu = w coeff/dt mu_old.
    std::vector<std::vector<double>> A = K;
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) {
        const auto g = eval_g(rho_old[i], cfg);
        const double coeff_old = params.eps + 2.0 * g.value;
        const double reaction = coeff_old + g.d1 * (rho[i] - rho_old[i]);
        const double w = weight(i, n, h);
        A[i][i] += w * reaction / dt;
        b[i] = w * coeff_old / dt * mu_old[i];
    }
    DenseStepResult out;
    out.rho = std::move(rho);
    out.mu = dense_solve_oracle(A, b);
    return out;
}

OracleReport run_step_equivalence(const std::vector<int>& sizes) {
    OracleReport report;
    PotentialConfig cfg; // logarithmic reference potentials
    SchemeParams params;
    params.eps = 0.05;
    const double dt = 1e-3;

    for (int n_x : sizes) {
        if (n_x > 16) throw std::invalid_argument("run_step_equivalence: size beyond dense cap (16)");
        const Grid grid = build_grid(GridKind::interval1d, n_x);

        FieldState state;
        state.t = 0.0;
        state.rho.resize(n_x);
        state.mu.resize(n_x);
        Lcg64 rng(42 + static_cast<std::uint64_t>(n_x));
        for (int i = 0; i < n_x; ++i) {
            state.rho[i] = 0.4 * rng.next_symmetric();
            state.mu[i] = 0.5 * (1.0 + rng.next_symmetric()) + 0.25;
        }

        const RhoSolveResult rho_solve =
            solve_rho_implicit(state, state.mu, dt, params, cfg, grid);
        if (!rho_solve.converged)
            throw std::runtime_error("run_step_equivalence: sparse rho solve failed");
        const MuSolveResult mu_solve =
            solve_mu_linear(state, rho_solve.rho, dt, params, cfg, grid);
        if (mu_solve.rejected)
            throw std::runtime_error("run_step_equivalence: sparse mu solve rejected");

        const DenseStepResult dense =
            dense_step_interval(state.rho, state.mu, n_x, dt, params, cfg);

        double dev = 0.0;
        for (int i = 0; i < n_x; ++i) {
            dev = std::max(dev, std::abs(rho_solve.rho[i] - dense.rho[i]));
            dev = std::max(dev, std::abs(mu_solve.mu[i] - dense.mu[i]));
        }
        report.sizes.push_back(n_x);
        report.deviation.push_back(dev);
        report.max_deviation = std::max(report.max_deviation, dev);
    }
    report.passed = report.max_deviation <= 1e-8;
    return report;
}

} // namespace nscahn
