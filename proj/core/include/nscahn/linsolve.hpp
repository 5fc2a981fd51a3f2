#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nscahn {

/// Compressed-row sparse matrix with a structurally symmetric pattern.
/// Assembled once per grid; per-step solvers only touch the diagonal.
class SparseMatrix {
public:
    SparseMatrix() = default;

    struct Triplet {
        int row;
        int col;
        double value;
    };

    /// Builds CSR from (row, col, value) entries; duplicates are summed.
    static SparseMatrix from_triplets(int n, std::vector<Triplet> entries);

    int size() const { return n_; }

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;

    /// A(i,i) += d[i]
    void add_to_diagonal(std::span<const double> d);
    /// A(i,i) += s
    void shift_diagonal(double s);

    std::vector<double> diagonal() const;

    /// A += B. Patterns need not match; the result is the union pattern.
    SparseMatrix plus(const SparseMatrix& other) const;

    double coeff(int row, int col) const;

    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return vals_; }

    std::vector<std::vector<double>> to_dense() const;

private:
    int n_ = 0;
    std::vector<int> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> vals_;
};

struct SolveReport {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
    /// Set when a CG search direction hit nonpositive curvature (matrix
    /// not positive definite); the caller may re-assemble with a shift.
    bool indefinite = false;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
/// Throws std::domain_error on a nonpositive diagonal entry.
/// On convergence ||Ax - b|| <= tol * ||b||.
std::vector<double> cg_solve(const SparseMatrix& A, std::span<const double> b,
                             double tol, int max_iter, SolveReport& report,
                             std::span<const double> x0 = {});

struct DenseSolveInfo {
    /// max |pivot| / min |pivot| from the LU factorization; a crude
    /// conditioning estimate.
    double pivot_ratio = 0.0;
    bool ill_conditioned = false;
};

/// Direct elimination with partial pivoting, n <= 512. Test oracle for the
/// sparse paths. Throws std::invalid_argument beyond the cap and
/// std::domain_error on numerical singularity.
std::vector<double> dense_solve_oracle(std::vector<std::vector<double>> A,
                                       std::vector<double> b,
                                       DenseSolveInfo* info = nullptr);

} // namespace nscahn
