#include "nscahn/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace nscahn {

namespace {

using nlohmann::json;

std::string kind_name(GridKind k) { return k == GridKind::interval1d ? "interval1d" : "slab2d"; }

GridKind kind_from(const std::string& s) {
    if (s == "interval1d") return GridKind::interval1d;
    if (s == "slab2d") return GridKind::slab2d;
    throw ConfigParseError("unknown geometry dim: " + s);
}

std::string bulk_kind_name(BulkKind k) {
    return k == BulkKind::logarithmic ? "logarithmic" : "regular_quartic";
}

BulkKind bulk_kind_from(const std::string& s) {
    if (s == "logarithmic") return BulkKind::logarithmic;
    if (s == "regular_quartic") return BulkKind::regular_quartic;
    throw ConfigParseError("unknown bulk_kind: " + s);
}

std::string init_kind_name(InitKind k) {
    switch (k) {
        case InitKind::constant: return "constant";
        case InitKind::sinusoidal: return "sinusoidal";
        default: return "seeded_random";
    }
}

InitKind init_kind_from(const std::string& s) {
    if (s == "constant") return InitKind::constant;
    if (s == "sinusoidal") return InitKind::sinusoidal;
    if (s == "seeded_random") return InitKind::seeded_random;
    throw ConfigParseError("unknown initial kind: " + s);
}

} // namespace

void RunConfig::validate() const {
    potentials.validate();
    scheme.validate();
    if (geometry.n_x < 4) throw std::invalid_argument("RunConfig: n_x < 4");
    if (geometry.dim == GridKind::slab2d && geometry.n_y < 4)
        throw std::invalid_argument("RunConfig: n_y < 4");
    if (!(initial.mu0 >= 0.0)) throw std::invalid_argument("RunConfig: mu0 must be >= 0");
    const double reach = std::abs(initial.rho0) +
                         (initial.kind == InitKind::constant ? 0.0 : std::abs(initial.amplitude));
    if (!(reach <= 0.9))
        throw std::invalid_argument("RunConfig: initial rho must stay within [-0.9, 0.9]");
    if (!(t_end >= 0.0)) throw std::invalid_argument("RunConfig: t_end < 0");
    if (record_every < 1) throw std::invalid_argument("RunConfig: record_every < 1");
    if (initial.kind == InitKind::sinusoidal && initial.modes < 1)
        throw std::invalid_argument("RunConfig: modes < 1");
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("config JSON parse failure: ") + e.what());
    }
    try {
        RunConfig c;
        const auto& geo = j.at("geometry");
        c.geometry.dim = kind_from(geo.at("dim").get<std::string>());
        c.geometry.n_x = geo.at("n_x").get<int>();
        c.geometry.n_y = geo.value("n_y", 0);

        const auto& pot = j.at("potentials");
        c.potentials.bulk_kind = bulk_kind_from(pot.at("bulk_kind").get<std::string>());
        c.potentials.alpha1 = pot.at("alpha1").get<double>();
        c.potentials.alpha2 = pot.at("alpha2").get<double>();
        c.potentials.alpha1_gamma = pot.at("alpha1_gamma").get<double>();
        c.potentials.alpha2_gamma = pot.at("alpha2_gamma").get<double>();
        c.potentials.g_a = pot.at("g_a").get<double>();
        c.potentials.g_b = pot.at("g_b").get<double>();
        c.potentials.clip_margin = pot.value("clip_margin", 1e-9);
        c.potentials.relaxed = pot.value("relaxed", false);

        const auto& sch = j.at("scheme");
        c.scheme.eps = sch.at("eps").get<double>();
        c.scheme.dt = sch.at("dt").get<double>();
        c.scheme.dt_min = sch.value("dt_min", 1e-8);
        c.scheme.dt_max = sch.value("dt_max", 1e-1);
        c.scheme.newton_tol = sch.value("newton_tol", 1e-10);
        c.scheme.newton_max_iter = sch.value("newton_max_iter", 50);
        c.scheme.lin_tol = sch.value("lin_tol", 1e-10);
        c.scheme.lin_max_iter = sch.value("lin_max_iter", 20000);
        c.scheme.positivity_guard = sch.value("positivity_guard", true);

        const auto& ini = j.at("initial");
        c.initial.kind = init_kind_from(ini.at("kind").get<std::string>());
        c.initial.rho0 = ini.value("rho0", 0.0);
        c.initial.mu0 = ini.at("mu0").get<double>();
        c.initial.amplitude = ini.value("amplitude", 0.0);
        c.initial.modes = ini.value("modes", 1);
        c.initial.seed = ini.value("seed", std::uint64_t{1});

        c.t_end = j.at("t_end").get<double>();
        c.out_dir = j.value("out_dir", std::string("out"));
        c.record_every = j.value("record_every", 100);
        return c;
    } catch (const json::exception& e) {
        throw ConfigParseError(std::string("config field error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigParseError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    json j;
    j["geometry"] = {{"dim", kind_name(c.geometry.dim)},
                     {"n_x", c.geometry.n_x},
                     {"n_y", c.geometry.n_y}};
    j["potentials"] = {{"bulk_kind", bulk_kind_name(c.potentials.bulk_kind)},
                       {"alpha1", c.potentials.alpha1},
                       {"alpha2", c.potentials.alpha2},
                       {"alpha1_gamma", c.potentials.alpha1_gamma},
                       {"alpha2_gamma", c.potentials.alpha2_gamma},
                       {"g_a", c.potentials.g_a},
                       {"g_b", c.potentials.g_b},
                       {"clip_margin", c.potentials.clip_margin},
                       {"relaxed", c.potentials.relaxed}};
    j["scheme"] = {{"eps", c.scheme.eps},
                   {"dt", c.scheme.dt},
                   {"dt_min", c.scheme.dt_min},
                   {"dt_max", c.scheme.dt_max},
                   {"newton_tol", c.scheme.newton_tol},
                   {"newton_max_iter", c.scheme.newton_max_iter},
                   {"lin_tol", c.scheme.lin_tol},
                   {"lin_max_iter", c.scheme.lin_max_iter},
                   {"positivity_guard", c.scheme.positivity_guard}};
    j["initial"] = {{"kind", init_kind_name(c.initial.kind)},
                    {"rho0", c.initial.rho0},
                    {"mu0", c.initial.mu0},
                    {"amplitude", c.initial.amplitude},
                    {"modes", c.initial.modes},
                    {"seed", c.initial.seed}};
    j["t_end"] = c.t_end;
    j["out_dir"] = c.out_dir;
    j["record_every"] = c.record_every;
    return j.dump(2);
}

std::string config_hash_hex(const RunConfig& cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream oss;
    oss << std::hex << h;
    return oss.str();
}

Grid build_grid(const GeometryConfig& geometry) {
    return build_grid(geometry.dim, geometry.n_x, geometry.n_y);
}

FieldState build_initial_state(const RunConfig& cfg, const Grid& grid) {
    cfg.validate();
    const int n = grid.n_nodes();
    FieldState s;
    s.t = 0.0;
    s.mu.assign(static_cast<std::size_t>(n), cfg.initial.mu0);
    s.rho.assign(static_cast<std::size_t>(n), cfg.initial.rho0);

    switch (cfg.initial.kind) {
        case InitKind::constant:
            break;
        case InitKind::sinusoidal: {
            const double two_pi = 2.0 * std::numbers::pi;
            for (int i = 0; i < n; ++i) {
                double v = std::sin(two_pi * cfg.initial.modes * grid.x[i]);
                if (grid.kind == GridKind::slab2d) v *= std::cos(std::numbers::pi * grid.y[i]);
                s.rho[i] += cfg.initial.amplitude * v;
            }
            break;
        }
        case InitKind::seeded_random: {
            Lcg64 rng(cfg.initial.seed);
            for (int i = 0; i < n; ++i) s.rho[i] += cfg.initial.amplitude * rng.next_symmetric();
            break;
        }
    }
    s.validate(grid);
    return s;
}

} // namespace nscahn
