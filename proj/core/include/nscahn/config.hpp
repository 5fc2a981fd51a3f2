#pragma once

#include <cstdint>
#include <string>

#include "nscahn/dynamics.hpp"
#include "nscahn/mesh.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

enum class InitKind : std::uint8_t { constant, sinusoidal, seeded_random };

struct GeometryConfig {
    GridKind dim = GridKind::interval1d;
    int n_x = 33;
    int n_y = 0;
};

struct InitialConfig {
    InitKind kind = InitKind::constant;
    double rho0 = 0.0;     // constant offset
    double mu0 = 0.0;      // constant chemical potential, >= 0
    double amplitude = 0.0;
    int modes = 1;         // sinusoidal only
    std::uint64_t seed = 1; // seeded_random only
};

struct RunConfig {
    GeometryConfig geometry;
    PotentialConfig potentials;
    SchemeParams scheme;
    InitialConfig initial;
    double t_end = 1.0;
    std::string out_dir = "out";
    int record_every = 100;

    /// Throws std::invalid_argument on violated invariants (mu0 >= 0, initial
    /// rho within [-0.9, 0.9], ...).
    void validate() const;
};

struct ConfigParseError : std::runtime_error {
    explicit ConfigParseError(const std::string& what) : std::runtime_error(what) {}
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a over the canonical serialization; identifies a run in metadata.
std::string config_hash_hex(const RunConfig& cfg);

/// Deterministic 64-bit LCG, identical across platforms:
///   state <- 6364136223846793005 * state + 1442695040888963407,
/// top 53 bits mapped to a uniform value in [-1, 1).
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}
    double next_symmetric() {
        state_ = 6364136223846793005ULL * state_ + 1442695040888963407ULL;
        const double u = static_cast<double>(state_ >> 11) * 0x1.0p-53; // [0, 1)
        return 2.0 * u - 1.0;
    }

private:
    std::uint64_t state_;
};

Grid build_grid(const GeometryConfig& geometry);
FieldState build_initial_state(const RunConfig& cfg, const Grid& grid);

} // namespace nscahn
