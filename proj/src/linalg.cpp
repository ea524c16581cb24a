#include "corrviz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace corrviz::linalg {

SymMatrix::SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    if (n == 0) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows, double sym_tol) {
    const std::size_t n = rows.size();
    if (n == 0) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
    for (const auto& r : rows) {
        if (r.size() != n) throw std::invalid_argument("SymMatrix: ragged rows");
    }
    double scale = 0.0;
    for (const auto& r : rows) {
        for (double v : r) {
            if (!std::isfinite(v)) throw std::invalid_argument("SymMatrix: non-finite entry");
            scale = std::max(scale, std::abs(v));
        }
    }
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double asym = std::abs(rows[i][j] - rows[j][i]);
            if (asym > sym_tol * std::max(scale, 1.0)) {
                throw std::invalid_argument("SymMatrix: asymmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
            m.set(i, j, 0.5 * (rows[i][j] + rows[j][i]));
        }
    }
    return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(const std::vector<double>& d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i];
    return t;
}

double SymMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
}

namespace {

double offdiag_norm(const std::vector<double>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(2.0 * s);
}

}  // namespace

EigenDecomposition eigh_symmetric(const SymMatrix& m, int max_sweeps) {
    const std::size_t n = m.size();
    std::vector<double> a = m.data();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double thresh = 1e-12 * std::max(m.frobenius_norm(), 1e-300);
    bool converged = offdiag_norm(a, n) <= thresh;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= thresh / (double)(n * n)) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;

                a[p * n + p] = app - h;
                a[q * n + q] = aqq + h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = akp - s * (akq + tau * akp);
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = akq + s * (akp - tau * akq);
                    a[q * n + k] = a[k * n + q];
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
        converged = offdiag_norm(a, n) <= thresh;
    }
    if (!converged) {
        throw EigenConvergenceError("eigh_symmetric: no convergence after " +
                                    std::to_string(max_sweeps) + " sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return a[x * n + x] > a[y * n + y];
    });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t col = order[k];
        out.values[k] = a[col * n + col];
        for (std::size_t i = 0; i < n; ++i) out.vectors[k][i] = v[i * n + col];
    }
    return out;
}

CholeskyFactor::CholeskyFactor(const SymMatrix& m) : n_(m.size()), l_(n_ * n_, 0.0) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, m(i, i));
    const double pivot_tol = 1e-12 * std::max(max_diag, 1e-300);

    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_[i * n_ + k] * l_[j * n_ + k];
            if (i == j) {
                if (s <= pivot_tol) {
                    throw NotPositiveDefinite("cholesky: pivot " + std::to_string(i) +
                                              " is not positive");
                }
                l_[i * n_ + i] = std::sqrt(s);
            } else {
                l_[i * n_ + j] = s / l_[j * n_ + j];
            }
        }
    }
}

std::vector<double> CholeskyFactor::solve_lower(const std::vector<double>& b) const {
    std::vector<double> z(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l_[i * n_ + k] * z[k];
        z[i] = s / l_[i * n_ + i];
    }
    return z;
}

std::vector<double> CholeskyFactor::solve(const std::vector<double>& b) const {
    std::vector<double> x = solve_lower(b);
    for (std::size_t ii = n_; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t k = ii + 1; k < n_; ++k) s -= l_[k * n_ + ii] * x[k];
        x[ii] = s / l_[ii * n_ + ii];
    }
    return x;
}

SymMatrix inverse_spd(const SymMatrix& m) {
    const std::size_t n = m.size();
    CholeskyFactor chol(m);
    SymMatrix inv(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = chol.solve(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i <= j; ++i) inv.set(i, j, col[i]);
    }
    return inv;
}

bool is_psd(const SymMatrix& m, double tol) {
    const EigenDecomposition eig = eigh_symmetric(m);
    const double largest = std::max(eig.values.front(), 0.0);
    const double smallest = eig.values.back();
    return smallest >= -tol * std::max(largest, 1e-300);
}

namespace {

// Regularized lower incomplete gamma P(a,x) by series, for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi2_sf(double d2, int dof) {
    if (d2 < 0.0) throw std::domain_error("chi2_sf: negative squared distance");
    if (dof < 1) throw std::domain_error("chi2_sf: dof must be >= 1");
    if (d2 == 0.0) return 1.0;
    const double a = 0.5 * dof;
    const double x = 0.5 * d2;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

}  // namespace corrviz::linalg
