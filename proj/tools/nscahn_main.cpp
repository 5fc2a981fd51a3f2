#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nscahn/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nscahn: nonstandard viscous Cahn-Hilliard system with dynamic boundary conditions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string eps_csv;
    std::string seed_from;
    double mu_s_value = 0.0;
    bool omega_limit = false;
    int oracle_size = 0;

    auto* check = app.add_subcommand("check", "validate the structural hypotheses of a config");
    check->add_option("--config", config_path, "config JSON path")->required();

    auto* run = app.add_subcommand("run", "integrate the system and write diagnostics");
    run->add_option("--config", config_path, "config JSON path")->required();

    auto* sweep = app.add_subcommand("sweep-eps", "vanishing-viscosity sweep");
    sweep->add_option("--config", config_path, "config JSON path")->required();
    sweep->add_option("--eps", eps_csv, "descending comma-separated eps list ending in 0");

    auto* stat = app.add_subcommand("stationary", "stationary solve / omega-limit study");
    stat->add_option("--config", config_path, "config JSON path")->required();
    auto* mu_opt = stat->add_option("--mu-s", mu_s_value, "constant chemical potential");
    stat->add_option("--seed-from", seed_from, "snapshot CSV used as the Newton guess");
    stat->add_flag("--omega-limit", omega_limit,
                   "run the dynamics first and cross-check the endpoint");

    auto* oracle = app.add_subcommand("oracle", "dense brute-force equivalence suite");
    auto* size_opt = oracle->add_option("--size", oracle_size, "single grid size in [4, 16]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : nscahn::cli::kExitUsage;
    }

    if (check->parsed()) return nscahn::cli::cmd_check(config_path);
    if (run->parsed()) return nscahn::cli::cmd_run(config_path);
    if (sweep->parsed()) return nscahn::cli::cmd_sweep_eps(config_path, eps_csv);
    if (stat->parsed()) {
        std::optional<double> mu_s;
        if (mu_opt->count() > 0) mu_s = mu_s_value;
        return nscahn::cli::cmd_stationary(config_path, mu_s, seed_from, omega_limit);
    }
    if (oracle->parsed()) {
        std::optional<int> size;
        if (size_opt->count() > 0) size = oracle_size;
        return nscahn::cli::cmd_oracle(size);
    }
    return nscahn::cli::kExitUsage;
}
