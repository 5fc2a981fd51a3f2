#include "nscahn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nscahn {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

const char* const kDiagnosticsCsvHeader =
    "t,dt,E_total,E_bulk_grad,E_bulk_pot,E_surf_grad,E_surf_pot,coupling,lyapunov,"
    "first_estimate_q,grad_mu,rho_rate,min_rho,max_rho,min_mu,newton_iters,flags";

std::string diagnostics_csv_row(const DiagnosticsRecord& rec) {
    std::ostringstream oss;
    oss << format_number(rec.t) << ',' << format_number(rec.dt_used) << ','
        << format_number(rec.energy.total) << ',' << format_number(rec.energy.bulk_grad) << ','
        << format_number(rec.energy.bulk_pot) << ',' << format_number(rec.energy.surf_grad)
        << ',' << format_number(rec.energy.surf_pot) << ',' << format_number(rec.coupling_term)
        << ',' << format_number(rec.lyapunov) << ',' << format_number(rec.first_estimate_q)
        << ',' << format_number(rec.grad_mu_norm) << ','
        << format_number(rec.rho_increment_rate) << ',' << format_number(rec.min_rho) << ','
        << format_number(rec.max_rho) << ',' << format_number(rec.min_mu) << ','
        << rec.newton_iters << ',' << rec.flags.bitmask();
    return oss.str();
}

void write_snapshot(const std::string& path, const FieldState& state, const Grid& grid) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot file for writing: " + path);
    out << "node,x,y,mu,rho\n";
    for (int i = 0; i < grid.n_nodes(); ++i) {
        out << i << ',' << format_number(grid.x[i]) << ',' << format_number(grid.y[i]) << ','
            << format_number(state.mu[i]) << ',' << format_number(state.rho[i]) << '\n';
    }
    if (!out) throw IoError("write failure on snapshot file: " + path);
}

Snapshot read_snapshot(const std::string& path, const Grid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("node,", 0) != 0)
        throw IoError("snapshot header missing in " + path);

    Snapshot snap;
    snap.mu.reserve(static_cast<std::size_t>(grid.n_nodes()));
    snap.rho.reserve(static_cast<std::size_t>(grid.n_nodes()));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double vals[4] = {0, 0, 0, 0};
        if (!std::getline(row, field, ',')) throw IoError("bad snapshot row in " + path);
        for (double& v : vals) {
            if (!std::getline(row, field, ',')) throw IoError("bad snapshot row in " + path);
            v = std::stod(field);
        }
        snap.mu.push_back(vals[2]);
        snap.rho.push_back(vals[3]);
    }
    if (static_cast<int>(snap.mu.size()) != grid.n_nodes())
        throw IoError("snapshot node count does not match the grid: " + path);
    return snap;
}

std::string metadata_json(const RunConfig& cfg, const Grid& grid) {
    nlohmann::json j;
    j["format"] = "nscahn-1";
    j["config_hash"] = config_hash_hex(cfg);
    j["grid"] = {{"dim", grid.kind == GridKind::interval1d ? "interval1d" : "slab2d"},
                 {"n_x", grid.n_x},
                 {"n_y", grid.n_y},
                 {"n_nodes", grid.n_nodes()},
                 {"n_boundary", static_cast<int>(grid.boundary_index.size())}};
    j["rng"] = "lcg64: s <- 6364136223846793005*s + 1442695040888963407; top 53 bits -> uniform [-1,1)";
    return j.dump(2);
}

} // namespace nscahn
