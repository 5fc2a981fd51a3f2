#include "nscahn/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nscahn {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> entries) {
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix A;
    A.n_ = n;
    A.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);

    std::size_t k = 0;
    while (k < entries.size()) {
        const int r = entries[k].row;
        const int c = entries[k].col;
        if (r < 0 || r >= n || c < 0 || c >= n)
            throw std::invalid_argument("SparseMatrix::from_triplets: index out of range");
        double v = 0.0;
        while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
            v += entries[k].value;
            ++k;
        }
        A.col_idx_.push_back(c);
        A.vals_.push_back(v);
        ++A.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (int i = 0; i < n; ++i) A.row_ptr_[i + 1] += A.row_ptr_[i];
    return A;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[col_idx_[k]];
        y[i] = s;
    }
}

void SparseMatrix::add_to_diagonal(std::span<const double> d) {
    for (int i = 0; i < n_; ++i) {
        bool found = false;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            if (col_idx_[k] == i) {
                vals_[k] += d[i];
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("SparseMatrix::add_to_diagonal: missing diagonal entry");
    }
}

void SparseMatrix::shift_diagonal(double s) {
    std::vector<double> d(static_cast<std::size_t>(n_), s);
    add_to_diagonal(d);
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_idx_[k] == i) d[i] = vals_[k];
    return d;
}

SparseMatrix SparseMatrix::plus(const SparseMatrix& other) const {
    if (n_ != other.n_) throw std::invalid_argument("SparseMatrix::plus: size mismatch");
    std::vector<Triplet> t;
    t.reserve(vals_.size() + other.vals_.size());
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            t.push_back({i, col_idx_[k], vals_[k]});
    for (int i = 0; i < other.n_; ++i)
        for (int k = other.row_ptr_[i]; k < other.row_ptr_[i + 1]; ++k)
            t.push_back({i, other.col_idx_[k], other.vals_[k]});
    return from_triplets(n_, std::move(t));
}

double SparseMatrix::coeff(int row, int col) const {
    for (int k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k)
        if (col_idx_[k] == col) return vals_[k];
    return 0.0;
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const {
    std::vector<std::vector<double>> D(static_cast<std::size_t>(n_),
                                       std::vector<double>(static_cast<std::size_t>(n_), 0.0));
    for (int i = 0; i < n_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) D[i][col_idx_[k]] = vals_[k];
    return D;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

} // namespace

std::vector<double> cg_solve(const SparseMatrix& A, std::span<const double> b,
                             double tol, int max_iter, SolveReport& report,
                             std::span<const double> x0) {
    const int n = A.size();
    report = {};

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    if (!x0.empty()) {
        if (static_cast<int>(x0.size()) != n)
            throw std::invalid_argument("cg_solve: initial guess size mismatch");
        std::copy(x0.begin(), x0.end(), x.begin());
    }

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        report.converged = true;
        return x;
    }

    std::vector<double> inv_diag = A.diagonal();
    for (double& d : inv_diag) {
        if (d <= 0.0) throw std::domain_error("cg_solve: nonpositive diagonal entry");
        d = 1.0 / d;
    }

    std::vector<double> r(static_cast<std::size_t>(n));
    A.multiply(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];

    double rnorm = norm2(r);
    if (rnorm <= tol * bnorm) {
        report.converged = true;
        report.rel_residual = rnorm / bnorm;
        return x;
    }

    std::vector<double> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    std::vector<double> p = z;
    std::vector<double> Ap(static_cast<std::size_t>(n));
    double rz = dot(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        A.multiply(p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0) {
            report.indefinite = true;
            report.iterations = it;
            report.rel_residual = rnorm / bnorm;
            return x;
        }
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        rnorm = norm2(r);
        report.iterations = it;
        if (rnorm <= tol * bnorm) {
            report.converged = true;
            break;
        }
        for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    report.rel_residual = rnorm / bnorm;
    return x;
}

std::vector<double> dense_solve_oracle(std::vector<std::vector<double>> A,
                                       std::vector<double> b, DenseSolveInfo* info) {
    const std::size_t n = A.size();
    if (n > 512) throw std::invalid_argument("dense_solve_oracle: n > 512");
    if (b.size() != n) throw std::invalid_argument("dense_solve_oracle: size mismatch");

    double pivot_min = 0.0, pivot_max = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        if (piv != k) {
            std::swap(A[piv], A[k]);
            std::swap(b[piv], b[k]);
        }
        const double p = A[k][k];
        const double ap = std::abs(p);
        if (ap < 1e-300) throw std::domain_error("dense_solve_oracle: singular matrix");
        if (k == 0) {
            pivot_min = pivot_max = ap;
        } else {
            pivot_min = std::min(pivot_min, ap);
            pivot_max = std::max(pivot_max, ap);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = A[i][k] / p;
            if (m == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
            b[i] -= m * b[k];
        }
    }

    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= A[ii][j] * x[j];
        x[ii] = s / A[ii][ii];
    }

    if (info) {
        info->pivot_ratio = pivot_min > 0.0 ? pivot_max / pivot_min : 0.0;
        info->ill_conditioned = info->pivot_ratio >= 1e8;
    }
    return x;
}

} // namespace nscahn
