#pragma once

#include <optional>
#include <string>

namespace nscahn::cli {

// Exit codes shared by all subcommands:
//   0 success, 1 domain failure (hypothesis/convergence), 2 usage or parse
//   error, 3 solver hard failure (partial outputs retained), 4 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

/// Prints the hypothesis report and separation bounds as JSON on stdout;
/// exit 0 iff all hypotheses hold.
int cmd_check(const std::string& config_path);

/// Integrates the configured problem, writing diagnostics.csv, snapshots and
/// a metadata sidecar under the output directory (NSCAHN_OUT_DIR overrides
/// the config's out_dir).
int cmd_run(const std::string& config_path);

/// Vanishing-viscosity sweep; eps_csv is a comma-separated descending list
/// ending in 0 (empty string selects the default 0.2,0.1,0.05,0.025,0).
/// Writes sweep_eps.json.
int cmd_sweep_eps(const std::string& config_path, const std::string& eps_csv);

/// Stationary solve for a given constant mu_s (guess from the config's
/// initial data or from a snapshot), or, with omega_limit set, a long-run
/// omega-limit study that extracts mu_s from the trajectory endpoint. Writes
/// stationary.json plus a rho_s snapshot.
int cmd_stationary(const std::string& config_path, std::optional<double> mu_s,
                   const std::string& seed_from, bool omega_limit);

/// Dense-oracle equivalence suite (interval1d, sizes {4, 8, 16} or one given
/// size <= 16); prints the max deviation; exit 0 iff <= 1e-8.
int cmd_oracle(std::optional<int> size);

/// Effective output directory for a run: $NSCAHN_OUT_DIR when set, else the
/// config's out_dir.
std::string resolve_out_dir(const std::string& configured);

} // namespace nscahn::cli
