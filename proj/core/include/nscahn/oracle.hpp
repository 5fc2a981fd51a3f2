#pragma once

#include <vector>

#include "nscahn/dynamics.hpp"
#include "nscahn/mesh.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

/// One full time step computed from independently assembled dense equations:
/// the interval grid weights and difference quotients are written out from
/// their definitions, the nonlinear rho-step is solved with a plain dense
/// Newton iteration and the mu-step with one dense factorization. Serves as
/// the brute-force reference for dynamics.step.
struct DenseStepResult {
    std::vector<double> rho;
    std::vector<double> mu;
};

DenseStepResult dense_step_interval(const std::vector<double>& rho_old,
                                    const std::vector<double>& mu_old, int n_x, double dt,
                                    const SchemeParams& params, const PotentialConfig& cfg);

struct OracleReport {
    std::vector<int> sizes;
    std::vector<double> deviation; // per size: max nodal |sparse - dense| over rho and mu
    double max_deviation = 0.0;
    bool passed = false; // max deviation <= 1e-8
};

/// Step-vs-brute-force equivalence on interval1d grids (n_x <= 16): seeded
/// interior data, one step per size through the production path and through
/// the dense path.
OracleReport run_step_equivalence(const std::vector<int>& sizes);

} // namespace nscahn
