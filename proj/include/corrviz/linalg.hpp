#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace corrviz::linalg {

class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

class EigenConvergenceError : public std::runtime_error {
public:
    explicit EigenConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense symmetric matrix, row-major storage. Symmetry is enforced at
/// construction; operator() writes both (i,j) and (j,i).
class SymMatrix {
public:
    explicit SymMatrix(std::size_t n);

    /// Builds from row-major data. Entries with relative asymmetry below
    /// `sym_tol` are symmetrized as (M + M^T)/2; larger asymmetry throws.
    static SymMatrix from_rows(const std::vector<std::vector<double>>& rows,
                               double sym_tol = 1e-9);
    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(const std::vector<double>& d);

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        a_[i * n_ + j] = v;
        a_[j * n_ + i] = v;
    }

    const std::vector<double>& data() const { return a_; }

    double trace() const;
    double frobenius_norm() const;
    double max_abs() const;

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct EigenDecomposition {
    std::vector<double> values;                // sorted descending
    std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi eigendecomposition. Eigenvalues descending, eigenvectors
/// orthonormal. Ties keep the Jacobi output order for determinism.
EigenDecomposition eigh_symmetric(const SymMatrix& m, int max_sweeps = 100);

/// Lower-triangular Cholesky factor L with L L^T = m.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// 1e-12 * max diagonal.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const SymMatrix& m);

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return l_[i * n_ + j]; }

    /// Solves L z = b (forward substitution).
    std::vector<double> solve_lower(const std::vector<double>& b) const;
    /// Solves L L^T x = b.
    std::vector<double> solve(const std::vector<double>& b) const;

private:
    std::size_t n_ = 0;
    std::vector<double> l_;
};

SymMatrix inverse_spd(const SymMatrix& m);

/// True iff the smallest eigenvalue is >= -tol * largest (in absolute terms
/// of the spectrum; identically-zero matrices count as PSD).
bool is_psd(const SymMatrix& m, double tol = 1e-9);

/// Survival function of the chi-squared distribution with `dof` degrees of
/// freedom, evaluated at d2. Regularized upper incomplete gamma Q(dof/2, d2/2).
double chi2_sf(double d2, int dof);

}  // namespace corrviz::linalg
