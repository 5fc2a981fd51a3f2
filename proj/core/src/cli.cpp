#include "nscahn/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nscahn/config.hpp"
#include "nscahn/diagnostics.hpp"
#include "nscahn/dynamics.hpp"
#include "nscahn/io.hpp"
#include "nscahn/oracle.hpp"
#include "nscahn/stationary.hpp"

namespace nscahn::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json report_json(const HypothesisReport& rep) {
    return json{{"hpg_ok", rep.hpg_ok},
                {"hpF_blowup_ok", rep.hpF_blowup_ok},
                {"hpF_lower_bound_ok", rep.hpF_lower_bound_ok},
                {"domination_ok", rep.domination_ok},
                {"C_lower", rep.C_lower},
                {"eta_dom", rep.eta_dom},
                {"C_dom", rep.C_dom},
                {"n_samples", rep.samples.size()}};
}

json bounds_json(const SeparationBounds& b) {
    return json{{"rho_lo", b.rho_lo}, {"rho_hi", b.rho_hi}, {"g_star", b.g_star},
                {"C_star", b.C_star}};
}

struct InitialRange {
    double lo, hi;
};

InitialRange initial_rho_range(const FieldState& s) {
    double lo = 1.0, hi = -1.0;
    for (double r : s.rho) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

} // namespace

std::string resolve_out_dir(const std::string& configured) {
    if (const char* env = std::getenv("NSCAHN_OUT_DIR"); env && *env) return env;
    return configured;
}

int cmd_check(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        cfg.validate();
    } catch (const ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const HypothesisReport rep = check_hypotheses(cfg.potentials);
    json out;
    out["format"] = "nscahn-1";
    out["hypotheses"] = report_json(rep);

    bool bounds_ok = false;
    try {
        const Grid grid = build_grid(cfg.geometry);
        const FieldState init = build_initial_state(cfg, grid);
        const auto range = initial_rho_range(init);
        const SeparationBounds b = separation_bounds(cfg.potentials, range.lo, range.hi);
        out["separation_bounds"] = bounds_json(b);
        bounds_ok = true;
    } catch (const std::exception& e) {
        out["separation_bounds"] = {{"error", e.what()}};
    }

    std::cout << out.dump(2) << std::endl;
    return (rep.all_ok() && bounds_ok) ? kExitOk : kExitDomain;
}

int cmd_run(const std::string& config_path) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        cfg.validate();
    } catch (const ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    const std::string out_dir = resolve_out_dir(cfg.out_dir);
    std::ofstream csv;
    try {
        fs::create_directories(out_dir);
        std::ofstream meta(out_dir + "/metadata.json", std::ios::binary);
        const Grid grid_for_meta = build_grid(cfg.geometry);
        meta << metadata_json(cfg, grid_for_meta) << "\n";
        if (!meta) throw IoError("write failure on metadata.json");
        csv.open(out_dir + "/diagnostics.csv", std::ios::binary);
        if (!csv) throw IoError("cannot open diagnostics.csv for writing");
        csv << kDiagnosticsCsvHeader << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    try {
        const Grid grid = build_grid(cfg.geometry);
        const FieldState init = build_initial_state(cfg, grid);

        long step_index = 0;
        bool io_failed = false;
        const FieldState final_state = simulate(
            init, cfg.t_end, cfg.scheme, cfg.potentials, grid,
            [&](const DiagnosticsRecord& rec, const FieldState& state) {
                csv << diagnostics_csv_row(rec) << "\n";
                if (step_index % cfg.record_every == 0) {
                    char name[48];
                    std::snprintf(name, sizeof name, "/snapshot_%06ld.csv", step_index);
                    write_snapshot(out_dir + name, state, grid);
                }
                if (!csv) io_failed = true;
                ++step_index;
            });
        if (io_failed) throw IoError("write failure on diagnostics.csv");

        write_snapshot(out_dir + "/snapshot_final.csv", final_state, grid);
        csv.flush();
        if (!csv) throw IoError("write failure on diagnostics.csv");
        return kExitOk;
    } catch (const SolverHardFailure& e) {
        std::cerr << "solver hard failure: " << e.what() << "\n";
        csv.flush();
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_sweep_eps(const std::string& config_path, const std::string& eps_csv) {
    RunConfig cfg;
    std::vector<double> eps_list;
    try {
        cfg = load_config(config_path);
        cfg.validate();
        if (eps_csv.empty()) {
            eps_list = {0.2, 0.1, 0.05, 0.025, 0.0};
        } else {
            std::istringstream ss(eps_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) eps_list.push_back(std::stod(tok));
        }
    } catch (const ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: bad eps list: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const Grid grid = build_grid(cfg.geometry);
        const FieldState init = build_initial_state(cfg, grid);
        const EpsSweepReport rep =
            sweep_epsilon(init, cfg.t_end, eps_list, cfg.scheme, cfg.potentials, grid);

        json out;
        out["format"] = "nscahn-1";
        out["t_end"] = rep.t_end;
        out["eps"] = rep.eps;
        out["d"] = rep.d;
        out["ratios"] = rep.ratios;

        const std::string out_dir = resolve_out_dir(cfg.out_dir);
        fs::create_directories(out_dir);
        std::ofstream f(out_dir + "/sweep_eps.json", std::ios::binary);
        f << out.dump(2) << "\n";
        if (!f) throw IoError("write failure on sweep_eps.json");
        std::cout << out.dump(2) << std::endl;
        return kExitOk;
    } catch (const SolverHardFailure& e) {
        std::cerr << "solver hard failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_stationary(const std::string& config_path, std::optional<double> mu_s,
                   const std::string& seed_from, bool omega_limit) {
    RunConfig cfg;
    try {
        cfg = load_config(config_path);
        cfg.validate();
    } catch (const ConfigParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const Grid grid = build_grid(cfg.geometry);
        const std::string out_dir = resolve_out_dir(cfg.out_dir);
        fs::create_directories(out_dir);

        json out;
        out["format"] = "nscahn-1";
        StationaryResult result;

        if (omega_limit) {
            const FieldState init = build_initial_state(cfg, grid);
            const OmegaLimitReport rep =
                omega_limit_study(init, cfg.t_end, cfg.scheme, cfg.potentials, grid);
            result = rep.stationary;
            out["omega_limit"] = {{"t_end", rep.t_end},
                                  {"grad_mu_norm", rep.grad_mu_norm},
                                  {"rho_increment_rate", rep.rho_increment_rate},
                                  {"mu_s_extracted", rep.mu_s_extracted},
                                  {"mu_spatial_variation", rep.mu_spatial_variation},
                                  {"distance_to_stationary", rep.distance_to_stationary},
                                  {"stationary_iterations", rep.stationary_iterations}};
        } else {
            FieldState guess;
            if (!seed_from.empty()) {
                const Snapshot snap = read_snapshot(seed_from, grid);
                guess.mu = snap.mu;
                guess.rho = snap.rho;
            } else {
                guess = build_initial_state(cfg, grid);
            }
            result = solve_stationary(mu_s.value_or(0.0), guess.rho, cfg.potentials, grid,
                                      cfg.scheme.newton_tol, cfg.scheme.newton_max_iter);
        }

        out["mu_s"] = result.mu_s;
        out["residual_norm"] = result.residual_norm;
        out["iterations"] = result.iterations;
        out["converged"] = result.converged;

        FieldState stationary_state;
        stationary_state.t = 0.0;
        stationary_state.rho = result.rho_s;
        stationary_state.mu.assign(result.rho_s.size(), result.mu_s);
        write_snapshot(out_dir + "/rho_s.csv", stationary_state, grid);

        std::ofstream f(out_dir + "/stationary.json", std::ios::binary);
        f << out.dump(2) << "\n";
        if (!f) throw IoError("write failure on stationary.json");
        std::cout << out.dump(2) << std::endl;
        return result.converged ? kExitOk : kExitDomain;
    } catch (const SolverHardFailure& e) {
        std::cerr << "solver hard failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_oracle(std::optional<int> size) {
    std::vector<int> sizes;
    if (size) {
        if (*size > 16 || *size < 4) {
            std::cerr << "error: oracle size must lie in [4, 16]\n";
            return kExitUsage;
        }
        sizes = {*size};
    } else {
        sizes = {4, 8, 16};
    }

    const OracleReport rep = run_step_equivalence(sizes);
    json out;
    out["format"] = "nscahn-1";
    out["sizes"] = rep.sizes;
    out["deviation"] = rep.deviation;
    out["max_deviation"] = rep.max_deviation;
    out["passed"] = rep.passed;
    std::cout << out.dump(2) << std::endl;
    return rep.passed ? kExitOk : kExitDomain;
}

} // namespace nscahn::cli
