#include "corrviz/stats.hpp"

#include <algorithm>
#include <cmath>

namespace corrviz::stats {

double DataSet::sigma(std::size_t i) const { return std::sqrt(cov(i, i)); }

std::string to_string(TargetPolicy p) {
    switch (p) {
        case TargetPolicy::second: return "second";
        case TargetPolicy::median: return "median";
        case TargetPolicy::smallest: return "smallest";
    }
    return "median";
}

TargetPolicy policy_from_string(const std::string& s) {
    if (s == "second") return TargetPolicy::second;
    if (s == "median") return TargetPolicy::median;
    if (s == "smallest") return TargetPolicy::smallest;
    throw std::invalid_argument("unknown target policy: " + s);
}

namespace {

// Flip each eigenvector so its largest-magnitude element is positive.
// Ties go to the lowest index.
void sign_normalize(EigenDecomposition& eig) {
    for (auto& u : eig.vectors) {
        std::size_t imax = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (std::abs(u[i]) > best) {
                best = std::abs(u[i]);
                imax = i;
            }
        }
        if (u[imax] < 0.0) {
            for (double& v : u) v = -v;
        }
    }
}

}  // namespace

CorrelationDecomposition correlation_from_covariance(const SymMatrix& cov) {
    const std::size_t n = cov.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cov(i, i) <= 0.0) {
            throw ZeroVariance("correlation undefined: variance of point " +
                               std::to_string(i) + " is not positive");
        }
        w[i] = std::sqrt(cov(i, i));
    }
    SymMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            c.set(i, j, cov(i, j) / (w[i] * w[j]));
        }
    }
    CorrelationDecomposition out{c, std::move(w), linalg::eigh_symmetric(c)};
    sign_normalize(out.eigen);
    return out;
}

double scale_factor(double lambda1, double lambda_target) {
    if (lambda1 <= 0.0) throw std::domain_error("scale_factor: lambda1 must be positive");
    if (lambda_target > lambda1) {
        throw std::domain_error("scale_factor: target eigenvalue exceeds lambda1");
    }
    if (lambda_target < 0.0) throw std::domain_error("scale_factor: negative target");
    return std::clamp(1.0 - lambda_target / lambda1, 0.0, 1.0);
}

ReducedCovariance reduce_components(const CorrelationDecomposition& decomp,
                                    std::size_t n_components, TargetPolicy policy) {
    const std::size_t n = decomp.correlation.size();
    if (n_components < 1 || n_components >= n) {
        throw std::invalid_argument("reduce_components: need 1 <= N_C < N");
    }
    const std::vector<double>& lam = decomp.eigen.values;

    double target = 0.0;
    switch (policy) {
        case TargetPolicy::second:
            target = lam[1];
            break;
        case TargetPolicy::median:
            // descending order; for even N this picks the larger middle value
            target = lam[(n - 1) / 2];
            break;
        case TargetPolicy::smallest:
            if (lam[n - 1] <= 1e-9 * std::max(lam[0], 0.0)) {
                throw RankDeficient(
                    "smallest-eigenvalue policy requires a full-rank correlation matrix");
            }
            target = lam[n - 1];
            break;
    }
    target = std::max(target, 0.0);

    ReducedCovariance out{decomp.correlation, n_components, {}, policy, target, {}};
    for (std::size_t k = 0; k < n_components; ++k) {
        const double s2 = scale_factor(lam[k], target);
        out.scale_sq.push_back(s2);
        const std::vector<double>& u = decomp.eigen.vectors[k];
        SymMatrix contrib(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                contrib.set(i, j, s2 * lam[k] * u[i] * u[j]);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                out.remaining.set(i, j, out.remaining(i, j) - contrib(i, j));
            }
        }
        out.contributions.push_back(std::move(contrib));
    }
    return out;
}

SymMatrix remaining_covariance(const std::vector<double>& scales, const SymMatrix& k) {
    const std::size_t n = k.size();
    if (scales.size() != n) throw std::invalid_argument("remaining_covariance: size mismatch");
    SymMatrix v(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            v.set(i, j, scales[i] * k(i, j) * scales[j]);
        }
    }
    return v;
}

double pairwise_conditional_mean_shift(double sigma_i, double rho_ij, double delta_yj,
                                       double sigma_j) {
    return sigma_i * rho_ij * (delta_yj / sigma_j);
}

double pairwise_conditional_variance(double sigma_i, double rho_ij) {
    return sigma_i * sigma_i * (1.0 - rho_ij * rho_ij);
}

std::vector<double> conditional_sigmas(const SymMatrix& cov) {
    const SymMatrix inv = linalg::inverse_spd(cov);
    std::vector<double> out(cov.size());
    for (std::size_t i = 0; i < cov.size(); ++i) {
        out[i] = 1.0 / std::sqrt(inv(i, i));
    }
    return out;
}

SymMatrix conditional_pair_covariance(const SymMatrix& cov, std::size_t i, std::size_t j) {
    if (i == j || i >= cov.size() || j >= cov.size()) {
        throw std::invalid_argument("conditional_pair_covariance: bad index pair");
    }
    const SymMatrix inv = linalg::inverse_spd(cov);
    const double a = inv(i, i);
    const double b = inv(i, j);
    const double d = inv(j, j);
    const double det = a * d - b * b;
    if (det <= 0.0) {
        throw NotPositiveDefinite("conditional_pair_covariance: singular 2x2 block");
    }
    SymMatrix out(2);
    out.set(0, 0, d / det);
    out.set(0, 1, -b / det);
    out.set(1, 1, a / det);
    return out;
}

double mahalanobis_sq(const std::vector<double>& y, const std::vector<double>& m,
                      const SymMatrix& cov) {
    if (y.size() != m.size() || y.size() != cov.size()) {
        throw std::invalid_argument("mahalanobis_sq: length mismatch");
    }
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - m[i];
    const linalg::CholeskyFactor chol(cov);
    const std::vector<double> z = chol.solve_lower(r);
    double d2 = 0.0;
    for (double v : z) d2 += v * v;
    return d2;
}

GofReport gof(const std::vector<double>& y, const std::vector<double>& m,
              const SymMatrix& cov) {
    GofReport rep;
    rep.d2 = mahalanobis_sq(y, m, cov);
    rep.dof = y.size();
    rep.p_value = linalg::chi2_sf(rep.d2, static_cast<int>(rep.dof));
    return rep;
}

std::vector<double> mdistance_gradient(const std::vector<double>& y,
                                       const std::vector<double>& m, const SymMatrix& cov) {
    if (y.size() != m.size() || y.size() != cov.size()) {
        throw std::invalid_argument("mdistance_gradient: length mismatch");
    }
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - m[i];
    const linalg::CholeskyFactor chol(cov);
    const std::vector<double> vinv_r = chol.solve(r);
    std::vector<double> g(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = -2.0 * vinv_r[i];
    return g;
}

GradientScaling scale_gradient(const std::vector<double>& y, const std::vector<double>& m,
                               const SymMatrix& cov, const std::vector<double>& g) {
    const std::size_t n = y.size();
    if (g.size() != n || m.size() != n || cov.size() != n) {
        throw std::invalid_argument("scale_gradient: length mismatch");
    }
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < 1e-14) throw ZeroGradient("scale_gradient: gradient is zero");

    std::vector<double> r(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = y[i] - m[i];
        d[i] = -g[i];
    }
    const linalg::CholeskyFactor chol(cov);
    const std::vector<double> vinv_r = chol.solve(r);
    const std::vector<double> vinv_d = chol.solve(d);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += d[i] * vinv_r[i];
        den += d[i] * vinv_d[i];
    }
    GradientScaling out;
    out.step = num / den;
    out.endpoint.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.endpoint[i] = m[i] + out.step * d[i];
    out.endpoint_d2 = mahalanobis_sq(y, out.endpoint, cov);
    return out;
}

}  // namespace corrviz::stats
