#include "nscahn/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace nscahn {

namespace {

using Triplet = SparseMatrix::Triplet;

void add_edge(std::vector<Triplet>& t, int a, int b, double c) {
    t.push_back({a, a, c});
    t.push_back({b, b, c});
    t.push_back({a, b, -c});
    t.push_back({b, a, -c});
}

Grid build_interval(int n_x) {
    Grid g;
    g.kind = GridKind::interval1d;
    g.n_x = n_x;
    g.n_y = 0;
    g.h_x = 1.0 / (n_x - 1);
    g.h_y = 0.0;

    g.x.resize(n_x);
    g.y.assign(n_x, 0.0);
    for (int i = 0; i < n_x; ++i) g.x[i] = static_cast<double>(i) / (n_x - 1);

    g.bulk_weights.assign(n_x, g.h_x);
    g.bulk_weights.front() = 0.5 * g.h_x;
    g.bulk_weights.back() = 0.5 * g.h_x;

    g.boundary_index = {0, n_x - 1};
    g.boundary_weights = {1.0, 1.0};
    g.surface_weight.assign(n_x, 0.0);
    g.surface_weight.front() = 1.0;
    g.surface_weight.back() = 1.0;
    g.is_boundary.assign(n_x, 0);
    g.is_boundary.front() = 1;
    g.is_boundary.back() = 1;

    std::vector<Triplet> tb;
    for (int i = 0; i + 1 < n_x; ++i) add_edge(tb, i, i + 1, 1.0 / g.h_x);
    g.stiff_bulk = SparseMatrix::from_triplets(n_x, std::move(tb));

    // Delta_Gamma degenerates to 0 on a two-point boundary: keep an explicit
    // zero matrix so the coupled form is uniform across geometries.
    std::vector<Triplet> ts;
    ts.push_back({0, 0, 0.0});
    ts.push_back({n_x - 1, n_x - 1, 0.0});
    g.stiff_surf = SparseMatrix::from_triplets(n_x, std::move(ts));
    return g;
}

Grid build_slab(int n_x, int n_y) {
    Grid g;
    g.kind = GridKind::slab2d;
    g.n_x = n_x;
    g.n_y = n_y;
    g.h_x = 1.0 / n_x; // periodic: n_x cells, n_x distinct nodes
    g.h_y = 1.0 / (n_y - 1);

    const int n = n_x * n_y;
    g.x.resize(n);
    g.y.resize(n);
    g.bulk_weights.resize(n);
    g.surface_weight.assign(n, 0.0);
    g.is_boundary.assign(n, 0);

    auto id = [n_x](int ix, int iy) { return iy * n_x + ix; };

    for (int iy = 0; iy < n_y; ++iy) {
        const double wy = (iy == 0 || iy == n_y - 1) ? 0.5 * g.h_y : g.h_y;
        for (int ix = 0; ix < n_x; ++ix) {
            const int i = id(ix, iy);
            g.x[i] = static_cast<double>(ix) / n_x;
            g.y[i] = static_cast<double>(iy) / (n_y - 1);
            g.bulk_weights[i] = wy * g.h_x;
        }
    }

    // Boundary: the line y = 0 then the line y = 1, each periodic in x.
    for (int iy : {0, n_y - 1}) {
        for (int ix = 0; ix < n_x; ++ix) {
            const int i = id(ix, iy);
            g.boundary_index.push_back(i);
            g.boundary_weights.push_back(g.h_x);
            g.surface_weight[i] = g.h_x;
            g.is_boundary[i] = 1;
        }
    }

    std::vector<Triplet> tb;
    for (int iy = 0; iy < n_y; ++iy) {
        const double wy = (iy == 0 || iy == n_y - 1) ? 0.5 * g.h_y : g.h_y;
        for (int ix = 0; ix < n_x; ++ix)
            add_edge(tb, id(ix, iy), id((ix + 1) % n_x, iy), wy / g.h_x);
    }
    for (int iy = 0; iy + 1 < n_y; ++iy)
        for (int ix = 0; ix < n_x; ++ix)
            add_edge(tb, id(ix, iy), id(ix, iy + 1), g.h_x / g.h_y);
    g.stiff_bulk = SparseMatrix::from_triplets(n, std::move(tb));

    std::vector<Triplet> ts;
    for (int iy : {0, n_y - 1})
        for (int ix = 0; ix < n_x; ++ix)
            add_edge(ts, id(ix, iy), id((ix + 1) % n_x, iy), 1.0 / g.h_x);
    g.stiff_surf = SparseMatrix::from_triplets(n, std::move(ts));
    return g;
}

} // namespace

Grid build_grid(GridKind kind, int n_x, int n_y) {
    if (kind == GridKind::interval1d) {
        if (n_x < 4) throw std::invalid_argument("build_grid: interval1d needs n_x >= 4");
        return build_interval(n_x);
    }
    if (n_x < 4 || n_y < 4) throw std::invalid_argument("build_grid: slab2d needs n_x, n_y >= 4");
    return build_slab(n_x, n_y);
}

void FieldState::validate(const Grid& grid) const {
    const std::size_t n = static_cast<std::size_t>(grid.n_nodes());
    if (mu.size() != n || rho.size() != n)
        throw std::invalid_argument("FieldState: array sizes do not match the grid");
    for (double r : rho)
        if (!(r > -1.0) || !(r < 1.0))
            throw std::domain_error("FieldState: rho must stay strictly inside (-1, 1)");
    for (double m : mu)
        if (!std::isfinite(m)) throw std::domain_error("FieldState: nonfinite mu");
}

std::vector<double> laplacian_neumann(std::span<const double> u, const Grid& grid) {
    const int n = grid.n_nodes();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("laplacian_neumann: size mismatch");
    std::vector<double> out(static_cast<std::size_t>(n));
    grid.stiff_bulk.multiply(u, out);
    for (int i = 0; i < n; ++i) out[i] = -out[i] / grid.bulk_weights[i];
    return out;
}

double gradient_form_bulk(std::span<const double> u, std::span<const double> v,
                          const Grid& grid) {
    std::vector<double> Au(u.size());
    grid.stiff_bulk.multiply(u, Au);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += Au[i] * v[i];
    return s;
}

double gradient_form_surface(std::span<const double> u, std::span<const double> v,
                             const Grid& grid) {
    std::vector<double> Au(u.size());
    grid.stiff_surf.multiply(u, Au);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += Au[i] * v[i];
    return s;
}

double coupled_gradient_form(std::span<const double> u, std::span<const double> v,
                             const Grid& grid) {
    return gradient_form_bulk(u, v, grid) + gradient_form_surface(u, v, grid);
}

double weighted_inner(std::span<const double> u, std::span<const double> v,
                      const Grid& grid, Domain domain) {
    double s = 0.0;
    if (domain == Domain::bulk) {
        for (int i = 0; i < grid.n_nodes(); ++i) s += grid.bulk_weights[i] * u[i] * v[i];
    } else {
        for (std::size_t k = 0; k < grid.boundary_index.size(); ++k) {
            const int i = grid.boundary_index[k];
            s += grid.boundary_weights[k] * u[i] * v[i];
        }
    }
    return s;
}

namespace {

// Neumaier-compensated sum; keeps the potential terms accurate enough for
// zero-tolerance stepwise energy comparisons.
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

} // namespace

EnergyBreakdown discrete_energy(const FieldState& state, const PotentialConfig& cfg,
                                const Grid& grid) {
    state.validate(grid);
    EnergyBreakdown e;
    e.bulk_grad = 0.5 * gradient_form_bulk(state.rho, state.rho, grid);
    e.surf_grad = 0.5 * gradient_form_surface(state.rho, state.rho, grid);

    KahanSum bulk_pot, surf_pot;
    for (int i = 0; i < grid.n_nodes(); ++i)
        bulk_pot.add(grid.bulk_weights[i] * eval_F(state.rho[i], cfg, Side::bulk).value);
    for (std::size_t k = 0; k < grid.boundary_index.size(); ++k) {
        const int i = grid.boundary_index[k];
        surf_pot.add(grid.boundary_weights[k] * eval_F(state.rho[i], cfg, Side::surface).value);
    }
    e.bulk_pot = bulk_pot.value();
    e.surf_pot = surf_pot.value();
    e.total = e.bulk_grad + e.bulk_pot + e.surf_grad + e.surf_pot;
    return e;
}

} // namespace nscahn
