#pragma once

#include <string>
#include <vector>

#include "nscahn/config.hpp"
#include "nscahn/diagnostics.hpp"
#include "nscahn/mesh.hpp"

namespace nscahn {

/// All numeric CSV fields use fixed scientific notation with 17 significant
/// digits so regression fixtures diff byte for byte.
std::string format_number(double v);

extern const char* const kDiagnosticsCsvHeader;
std::string diagnostics_csv_row(const DiagnosticsRecord& rec);

/// Snapshot CSV: header "node,x,y,mu,rho", one row per node.
void write_snapshot(const std::string& path, const FieldState& state, const Grid& grid);

struct Snapshot {
    std::vector<double> mu;
    std::vector<double> rho;
};

/// Reads a snapshot written by write_snapshot; validates the node count.
Snapshot read_snapshot(const std::string& path, const Grid& grid);

/// Run metadata sidecar (format version "nscahn-1", config hash, grid spec,
/// RNG documentation).
std::string metadata_json(const RunConfig& cfg, const Grid& grid);

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nscahn
