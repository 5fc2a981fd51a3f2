#pragma once

#include <cstdint>
#include <vector>

namespace nscahn {

enum class BulkKind : std::uint8_t { logarithmic, regular_quartic };
enum class Side : std::uint8_t { bulk, surface };

/// Nonlinear data of the model: bulk potential F, surface potential F_Gamma,
/// and the concave quadratic mobility g(r) = g_a - g_b r^2.
struct PotentialConfig {
    BulkKind bulk_kind = BulkKind::logarithmic;
    double alpha1 = 2.0;
    double alpha2 = 0.0;
    double alpha1_gamma = 2.0;
    double alpha2_gamma = 0.0;
    double g_a = 1.0;
    double g_b = 1.0;
    /// Interior clamp distance from +-1 used by the implicit solvers.
    double clip_margin = 1e-9;
    /// The quartic family violates the blow-up hypothesis on F'; it is only
    /// accepted when the caller explicitly opts in.
    bool relaxed = false;

    /// Throws std::invalid_argument on a malformed config.
    void validate() const;
};

struct PotentialValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// g, g', g'' at r in [-1, 1]. Throws std::domain_error outside.
PotentialValue eval_g(double r, const PotentialConfig& cfg);

/// F, F', F'' at r strictly inside (-1, 1); `which` selects bulk or surface
/// coefficients. The derivative is singular at +-1 for the logarithmic kind,
/// and both kinds share the domain contract: throws std::domain_error at
/// |r| >= 1.
PotentialValue eval_F(double r, const PotentialConfig& cfg, Side which);

struct SplitValue {
    double beta = 0.0, beta1 = 0.0, beta2 = 0.0; // convex part and derivatives
    double pi = 0.0, pi1 = 0.0, pi2 = 0.0;       // smooth part and derivatives
};

/// Convex/smooth decomposition F = beta + pi with beta'' >= 0 and pi'' bounded.
/// logarithmic: beta = (1+r)ln(1+r) + (1-r)ln(1-r); quartic: beta = r^4/4.
/// In both cases pi = alpha1 (1 - r^2) + alpha2 r.
SplitValue convex_smooth_split(double r, const PotentialConfig& cfg, Side which);

struct ProbeSample {
    double r = 0.0;
    /// Slack of the domination certificate at r:
    /// eta * |F_Gamma'(r)| + C - |F'(r)|.
    double margin = 0.0;
};

struct HypothesisReport {
    bool hpg_ok = false;           // g >= 0, g'' <= 0, g'(-1) > 0, g'(1) < 0
    bool hpF_blowup_ok = false;    // F' -> -inf / +inf at the endpoints
    bool hpF_lower_bound_ok = false; // F'' and F_Gamma'' bounded below
    bool domination_ok = false;    // |F'| <= eta |F_Gamma'| + C on the probes
    double C_lower = 0.0;          // smallest C with F'' >= -C and F_Gamma'' >= -C
    double eta_dom = 0.0;
    double C_dom = 0.0;
    std::vector<ProbeSample> samples;

    bool all_ok() const { return hpg_ok && hpF_blowup_ok && hpF_lower_bound_ok && domination_ok; }
};

/// Evaluates the four structural hypotheses on a geometric probe grid
/// r = +-(1 - 2^-k), k = 1..40, plus a uniform interior grid. Never throws
/// for a validated config; failures are carried in the report.
HypothesisReport check_hypotheses(const PotentialConfig& cfg);

struct SeparationBounds {
    double rho_lo = 0.0; // rho_*
    double rho_hi = 0.0; // rho^*
    double g_star = 0.0; // min of g on [rho_lo, rho_hi]
    double C_star = 0.0; // max of |g|,|g'|,|g''|,|F|,|F'|,|F''| and surface analogues
};

/// Bounds rho_lo <= rho0 <= rho_hi such that g' > 0, F' < 0 below rho_lo and
/// g' < 0, F' > 0 above rho_hi. The outer roots of F' are located by
/// bisection to 1e-12 and pushed out by one tolerance. Throws
/// std::domain_error when no bound fits below 1 - clip_margin.
SeparationBounds separation_bounds(const PotentialConfig& cfg, double rho0_min,
                                   double rho0_max);

} // namespace nscahn
