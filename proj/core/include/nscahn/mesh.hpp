#pragma once

#include <span>
#include <vector>

#include "nscahn/linsolve.hpp"
#include "nscahn/potentials.hpp"

namespace nscahn {

enum class GridKind : std::uint8_t { interval1d, slab2d };
enum class Domain : std::uint8_t { bulk, boundary };

/// Desk-scale geometry on the unit interval / unit square (periodic in x).
/// Boundary unknowns are bulk unknowns: the trace identification rho_Gamma =
/// rho|Gamma holds by node sharing. Quadrature weights match the difference
/// stencils so that summation by parts is exact.
struct Grid {
    GridKind kind = GridKind::interval1d;
    int n_x = 0;
    int n_y = 0; // 0 for interval1d
    double h_x = 0.0;
    double h_y = 0.0;

    std::vector<double> x; // node coordinates
    std::vector<double> y; // zero for interval1d

    std::vector<double> bulk_weights;     // per node, sums to |Omega| = 1
    std::vector<int> boundary_index;      // ordered boundary node ids
    std::vector<double> boundary_weights; // per boundary node, sums to |Gamma| = 2
    std::vector<double> surface_weight;   // per node; 0 off the boundary
    std::vector<char> is_boundary;        // per node

    /// Stiffness of the bulk Dirichlet form (Neumann natural BC) and of the
    /// surface form (empty pattern with zero rows for interval1d, where the
    /// Laplace-Beltrami operator degenerates to 0).
    SparseMatrix stiff_bulk;
    SparseMatrix stiff_surf;

    int n_nodes() const { return static_cast<int>(bulk_weights.size()); }
};

/// interval1d: x_i = i/(n_x-1), trapezoid weights, boundary {0, n_x-1}.
/// slab2d: n_x periodic cells in x, n_y nodes in y on [0,1]; boundary is the
/// two lines y in {0,1}. Throws std::invalid_argument on sizes < 4.
Grid build_grid(GridKind kind, int n_x, int n_y = 0);

/// Time stamp plus the discrete pair (mu, rho); rho_Gamma is the restriction
/// of rho to boundary_index.
struct FieldState {
    double t = 0.0;
    std::vector<double> mu;
    std::vector<double> rho;

    /// Throws when sizes mismatch the grid or rho touches [-1, 1].
    void validate(const Grid& grid) const;
};

/// Discrete Neumann Laplacian (mirrored ghost values); annihilates constants
/// exactly and satisfies <(-Lap u), v>_bulk = a_bulk(u, v).
std::vector<double> laplacian_neumann(std::span<const double> u, const Grid& grid);

/// a(u, v) = integral of grad u . grad v over Omega plus the surface-gradient
/// term over Gamma (slab2d). Symmetric, vanishes on constants.
double coupled_gradient_form(std::span<const double> u, std::span<const double> v,
                             const Grid& grid);

double gradient_form_bulk(std::span<const double> u, std::span<const double> v,
                          const Grid& grid);
double gradient_form_surface(std::span<const double> u, std::span<const double> v,
                             const Grid& grid);

/// Weighted l2 pairing over bulk nodes or boundary nodes (full-size arrays,
/// boundary values picked through boundary_index).
double weighted_inner(std::span<const double> u, std::span<const double> v,
                      const Grid& grid, Domain domain);

struct EnergyBreakdown {
    double total = 0.0;
    double bulk_grad = 0.0;
    double bulk_pot = 0.0;
    double surf_grad = 0.0;
    double surf_pot = 0.0;
};

/// Discrete free energy
///   1/2 a_bulk(rho, rho) + <F(rho)>_bulk + 1/2 a_surf(rho, rho) + <F_Gamma(rho)>_surf.
/// Potential sums use compensated accumulation so stepwise energy comparisons
/// are meaningful at machine precision. Throws std::domain_error when rho
/// touches +-1.
EnergyBreakdown discrete_energy(const FieldState& state, const PotentialConfig& cfg,
                                const Grid& grid);

} // namespace nscahn
