#include "nscahn/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nscahn {

void PotentialConfig::validate() const {
    if (!(g_a >= g_b) || !(g_b > 0.0))
        throw std::invalid_argument("PotentialConfig: need g_a >= g_b > 0");
    if (!(clip_margin > 0.0) || !(clip_margin < 0.5))
        throw std::invalid_argument("PotentialConfig: clip_margin must lie in (0, 0.5)");
    if (bulk_kind == BulkKind::regular_quartic && !relaxed)
        throw std::invalid_argument(
            "PotentialConfig: regular_quartic requires relaxed mode (unbounded F' hypothesis fails)");
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2) || !std::isfinite(alpha1_gamma) ||
        !std::isfinite(alpha2_gamma) || !std::isfinite(g_a) || !std::isfinite(g_b))
        throw std::invalid_argument("PotentialConfig: nonfinite coefficient");
}

PotentialValue eval_g(double r, const PotentialConfig& cfg) {
    if (std::abs(r) > 1.0) throw std::domain_error("eval_g: |r| > 1");
    return {cfg.g_a - cfg.g_b * r * r, -2.0 * cfg.g_b * r, -2.0 * cfg.g_b};
}

namespace {

struct Coeffs {
    double a1, a2;
};

Coeffs side_coeffs(const PotentialConfig& cfg, Side which) {
    return which == Side::bulk ? Coeffs{cfg.alpha1, cfg.alpha2}
                               : Coeffs{cfg.alpha1_gamma, cfg.alpha2_gamma};
}

void require_interior(double r, const char* who) {
    if (!(std::abs(r) < 1.0)) throw std::domain_error(std::string(who) + ": |r| >= 1");
}

} // namespace

SplitValue convex_smooth_split(double r, const PotentialConfig& cfg, Side which) {
    require_interior(r, "convex_smooth_split");
    const auto [a1, a2] = side_coeffs(cfg, which);
    SplitValue s;
    if (cfg.bulk_kind == BulkKind::logarithmic) {
        const double p = 1.0 + r, m = 1.0 - r;
        s.beta = p * std::log(p) + m * std::log(m);
        s.beta1 = std::log(p / m);
        s.beta2 = 2.0 / (p * m);
    } else {
        const double r2 = r * r;
        s.beta = 0.25 * r2 * r2;
        s.beta1 = r2 * r;
        s.beta2 = 3.0 * r2;
    }
    s.pi = a1 * (1.0 - r * r) + a2 * r;
    s.pi1 = -2.0 * a1 * r + a2;
    s.pi2 = -2.0 * a1;
    return s;
}

PotentialValue eval_F(double r, const PotentialConfig& cfg, Side which) {
    require_interior(r, "eval_F");
    const SplitValue s = convex_smooth_split(r, cfg, which);
    return {s.beta + s.pi, s.beta1 + s.pi1, s.beta2 + s.pi2};
}

namespace {

// Geometric probes accumulating at the endpoints plus a uniform sweep.
std::vector<double> probe_grid() {
    std::vector<double> r;
    for (int k = 1; k <= 40; ++k) {
        const double d = std::ldexp(1.0, -k); // 2^-k
        r.push_back(1.0 - d);
        r.push_back(-(1.0 - d));
    }
    const int m = 401;
    for (int i = 0; i < m; ++i) {
        const double x = -0.995 + 1.99 * static_cast<double>(i) / (m - 1);
        r.push_back(x);
    }
    std::sort(r.begin(), r.end());
    return r;
}

double min_second_derivative(const PotentialConfig& cfg, Side which) {
    const auto [a1, a2] = side_coeffs(cfg, which);
    (void)a2;
    // logarithmic: F'' = 2/(1-r^2) - 2 a1, minimized at r = 0;
    // quartic: F'' = 3 r^2 - 2 a1, minimized at r = 0.
    return cfg.bulk_kind == BulkKind::logarithmic ? 2.0 - 2.0 * a1 : -2.0 * a1;
}

// F' must diverge monotonically to +inf along r_k = 1 - 2^-k and to -inf
// along -r_k. Polynomials plateau, the log family keeps gaining ~ln 2 per k.
// The tail starts deep (k >= 25) so the bounded -2 a1 r term cannot mask the
// divergence for large a1.
bool blowup_ok_side(const PotentialConfig& cfg, Side which) {
    auto d1 = [&](double r) { return eval_F(r, cfg, which).d1; };
    double prev_hi = d1(1.0 - std::ldexp(1.0, -24));
    double prev_lo = d1(-(1.0 - std::ldexp(1.0, -24)));
    double at30_hi = 0.0, at30_lo = 0.0;
    for (int k = 25; k <= 40; ++k) {
        const double r = 1.0 - std::ldexp(1.0, -k);
        const double hi = d1(r), lo = d1(-r);
        if (!(hi > prev_hi) || !(lo < prev_lo)) return false;
        prev_hi = hi;
        prev_lo = lo;
        if (k == 30) {
            at30_hi = hi;
            at30_lo = lo;
        }
    }
    return (prev_hi - at30_hi) >= 1.0 && (prev_lo - at30_lo) <= -1.0;
}

} // namespace

HypothesisReport check_hypotheses(const PotentialConfig& cfg) {
    HypothesisReport rep;

    // (hpg): closed form for the concave quadratic family, cross-checked on
    // the endpoints.
    const auto g_m1 = eval_g(-1.0, cfg);
    const auto g_p1 = eval_g(1.0, cfg);
    rep.hpg_ok = cfg.g_a >= cfg.g_b && cfg.g_b > 0.0 && g_m1.d1 > 0.0 && g_p1.d1 < 0.0 &&
                 g_m1.value >= 0.0 && g_p1.value >= 0.0 && g_m1.d2 <= 0.0;

    // (hpFprimo)
    rep.hpF_blowup_ok = blowup_ok_side(cfg, Side::bulk) && blowup_ok_side(cfg, Side::surface);

    // (hpFsecondo): both families have an analytic minimum of F'' at r = 0.
    const double m_bulk = min_second_derivative(cfg, Side::bulk);
    const double m_surf = min_second_derivative(cfg, Side::surface);
    rep.C_lower = std::max({0.0, -m_bulk, -m_surf});
    rep.hpF_lower_bound_ok = true;

    // (domination): fitted certificate |F'| <= eta |F_Gamma'| + C on the probe
    // grid. eta is the worst probe ratio where |F_Gamma'| is not small, C
    // soaks the rest; the certificate is rejected when the ratio still grows
    // along the deepest tail (F' diverging against a bounded F_Gamma').
    const std::vector<double> probes = probe_grid();
    double eta = 0.0;
    double ratio_mid = 0.0, ratio_deep = 0.0;
    for (double r : probes) {
        const double fp = std::abs(eval_F(r, cfg, Side::bulk).d1);
        const double gp = std::abs(eval_F(r, cfg, Side::surface).d1);
        if (gp >= 1.0) {
            const double q = fp / gp;
            eta = std::max(eta, q);
            const double depth = 1.0 - std::abs(r);
            if (depth <= std::ldexp(1.0, -15) && depth > std::ldexp(1.0, -25))
                ratio_mid = std::max(ratio_mid, q);
            if (depth <= std::ldexp(1.0, -30)) ratio_deep = std::max(ratio_deep, q);
        }
    }
    double C_dom = 0.0;
    for (double r : probes) {
        const double fp = std::abs(eval_F(r, cfg, Side::bulk).d1);
        const double gp = std::abs(eval_F(r, cfg, Side::surface).d1);
        C_dom = std::max(C_dom, fp - eta * gp);
    }
    C_dom = std::max(C_dom, 0.0);
    rep.eta_dom = eta;
    rep.C_dom = C_dom;

    const bool tail_stable = ratio_deep <= std::max(1.05 * ratio_mid, 1.5);
    bool holds = true;
    rep.samples.reserve(probes.size());
    for (double r : probes) {
        const double fp = std::abs(eval_F(r, cfg, Side::bulk).d1);
        const double gp = std::abs(eval_F(r, cfg, Side::surface).d1);
        const double margin = eta * gp + C_dom - fp;
        rep.samples.push_back({r, margin});
        if (margin < -1e-9 * (1.0 + fp)) holds = false;
    }
    rep.domination_ok = holds && tail_stable;

    return rep;
}

namespace {

constexpr double kRootTol = 1e-12;

// Rightmost zero of F' in (0, 1). Returns 0.0 when F' has no sign change
// there (then F' keeps one sign up to the endpoint blow-up).
double outer_positive_root(const PotentialConfig& cfg, Side which) {
    auto f = [&](double r) { return eval_F(r, cfg, which).d1; };
    const double r_max = 1.0 - 1e-13;
    const int m = 4096;
    double hi = r_max;
    double fhi = f(hi);
    double lo = 0.0, flo = 0.0;
    bool found = false;
    for (int i = m - 1; i >= 1; --i) {
        const double r = r_max * static_cast<double>(i) / m;
        const double fr = f(r);
        if (fr == 0.0) return r;
        if (fr * fhi < 0.0) {
            lo = r;
            flo = fr;
            found = true;
            break;
        }
        hi = r;
        fhi = fr;
    }
    if (!found) return 0.0;
    while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm * flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Leftmost zero of F' in (-1, 0), same convention.
double outer_negative_root(const PotentialConfig& cfg, Side which) {
    auto f = [&](double r) { return eval_F(r, cfg, which).d1; };
    const double r_min = -(1.0 - 1e-13);
    const int m = 4096;
    double lo = r_min;
    double flo = f(lo);
    double hi = 0.0, fhi = 0.0;
    bool found = false;
    for (int i = m - 1; i >= 1; --i) {
        const double r = r_min * static_cast<double>(i) / m;
        const double fr = f(r);
        if (fr == 0.0) return r;
        if (fr * flo < 0.0) {
            hi = r;
            fhi = fr;
            found = true;
            break;
        }
        lo = r;
        flo = fr;
    }
    if (!found) return 0.0;
    (void)fhi;
    while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm * flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

SeparationBounds separation_bounds(const PotentialConfig& cfg, double rho0_min,
                                   double rho0_max) {
    if (!(rho0_min > -1.0) || !(rho0_max < 1.0) || !(rho0_min <= rho0_max))
        throw std::invalid_argument("separation_bounds: need -1 < rho0_min <= rho0_max < 1");

    // The sign conditions must hold for both potentials, so take the outermost
    // roots over bulk and surface.
    const double root_hi =
        std::max(outer_positive_root(cfg, Side::bulk), outer_positive_root(cfg, Side::surface));
    const double root_lo =
        std::min(outer_negative_root(cfg, Side::bulk), outer_negative_root(cfg, Side::surface));

    SeparationBounds b;
    b.rho_hi = std::max({rho0_max, root_hi + kRootTol, kRootTol});
    b.rho_lo = std::min({rho0_min, root_lo - kRootTol, -kRootTol});

    const double cap = 1.0 - cfg.clip_margin;
    if (!(b.rho_hi < cap) || !(b.rho_lo > -cap))
        throw std::domain_error(
            "separation_bounds: no valid bound below 1 - clip_margin (config and initial data incompatible)");

    // Verify the defining sign conditions on probe tails.
    auto check_signs = [&](Side which) {
        for (int i = 0; i <= 200; ++i) {
            const double t = static_cast<double>(i) / 200.0;
            const double r_above = b.rho_hi + t * (cap - b.rho_hi);
            const double r_below = -cap + t * (b.rho_lo + cap);
            if (!(eval_F(r_above, cfg, which).d1 > 0.0) ||
                !(eval_F(r_below, cfg, which).d1 < 0.0))
                throw std::domain_error("separation_bounds: sign condition on F' fails");
        }
    };
    check_signs(Side::bulk);
    check_signs(Side::surface);
    if (!(eval_g(b.rho_hi, cfg).d1 < 0.0) || !(eval_g(b.rho_lo, cfg).d1 > 0.0))
        throw std::domain_error("separation_bounds: sign condition on g' fails");

    // Grid scan for g_* and C^* on [rho_lo, rho_hi].
    const int m = 10000;
    double g_star = std::numeric_limits<double>::infinity();
    double C_star = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double r = b.rho_lo + (b.rho_hi - b.rho_lo) * static_cast<double>(i) / m;
        const auto g = eval_g(r, cfg);
        const auto F = eval_F(r, cfg, Side::bulk);
        const auto G = eval_F(r, cfg, Side::surface);
        g_star = std::min(g_star, g.value);
        C_star = std::max({C_star, std::abs(g.value), std::abs(g.d1), std::abs(g.d2),
                           std::abs(F.value), std::abs(F.d1), std::abs(F.d2), std::abs(G.value),
                           std::abs(G.d1), std::abs(G.d2)});
    }
    if (!(g_star > 0.0))
        throw std::domain_error("separation_bounds: g is not positive on the bounds interval");
    b.g_star = g_star;
    b.C_star = C_star;
    return b;
}

} // namespace nscahn
