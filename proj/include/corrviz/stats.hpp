#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corrviz/linalg.hpp"

namespace corrviz::stats {

using linalg::EigenDecomposition;
using linalg::NotPositiveDefinite;
using linalg::SymMatrix;

class ZeroVariance : public std::runtime_error {
public:
    explicit ZeroVariance(const std::string& what) : std::runtime_error(what) {}
};

class RankDeficient : public std::runtime_error {
public:
    explicit RankDeficient(const std::string& what) : std::runtime_error(what) {}
};

class ZeroGradient : public std::runtime_error {
public:
    explicit ZeroGradient(const std::string& what) : std::runtime_error(what) {}
};

struct Model {
    std::string name;
    std::vector<double> values;
};

/// Measured points with their full covariance and optional model predictions.
struct DataSet {
    std::vector<double> x;  // strictly increasing
    std::vector<double> y;
    SymMatrix cov;
    std::vector<Model> models;
    std::string xlabel;  // optional axis titles
    std::string ylabel;

    std::size_t size() const { return y.size(); }
    double sigma(std::size_t i) const;
};

/// C = W^-1 V W^-1 together with its sign-normalized eigensystem.
struct CorrelationDecomposition {
    SymMatrix correlation;       // dimensionless, unit diagonal
    std::vector<double> scales;  // W: sqrt of the covariance diagonal
    EigenDecomposition eigen;    // of the correlation matrix
};

enum class TargetPolicy { second, median, smallest };

std::string to_string(TargetPolicy p);
TargetPolicy policy_from_string(const std::string& s);

/// K = C - sum_i s_i^2 lambda_i u_i u_i^T for the leading n_components.
struct ReducedCovariance {
    SymMatrix remaining;  // K
    std::size_t n_components = 0;
    std::vector<double> scale_sq;  // s_i^2 per kept component, each in [0,1]
    TargetPolicy policy = TargetPolicy::median;
    double target_lambda = 0.0;
    std::vector<SymMatrix> contributions;  // s_i^2 lambda_i u_i u_i^T
};

struct GofReport {
    double d2 = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::optional<std::vector<double>> gradient;
    std::optional<double> gradient_endpoint_d2;
};

struct GradientScaling {
    double step = 0.0;              // t*
    std::vector<double> endpoint;   // m + t* d
    double endpoint_d2 = 0.0;
};

CorrelationDecomposition correlation_from_covariance(const SymMatrix& cov);

/// s^2 = 1 - lambda_target / lambda1, clamped to [0,1].
double scale_factor(double lambda1, double lambda_target);

ReducedCovariance reduce_components(const CorrelationDecomposition& decomp,
                                    std::size_t n_components, TargetPolicy policy);

/// V_K with (V_K)_ij = sigma_i K_ij sigma_j.
SymMatrix remaining_covariance(const std::vector<double>& scales, const SymMatrix& k);

double pairwise_conditional_mean_shift(double sigma_i, double rho_ij, double delta_yj,
                                       double sigma_j);

double pairwise_conditional_variance(double sigma_i, double rho_ij);

/// sigma_{i,cond} = ((V^-1)_ii)^{-1/2} for every point.
std::vector<double> conditional_sigmas(const SymMatrix& cov);

/// Conditional covariance of points (i,j) with all other points fixed:
/// the inverse of the (i,j) 2x2 submatrix of V^-1.
SymMatrix conditional_pair_covariance(const SymMatrix& cov, std::size_t i, std::size_t j);

double mahalanobis_sq(const std::vector<double>& y, const std::vector<double>& m,
                      const SymMatrix& cov);

GofReport gof(const std::vector<double>& y, const std::vector<double>& m,
              const SymMatrix& cov);

/// Gradient of d^2 with respect to the model prediction: -2 V^-1 (y - m).
std::vector<double> mdistance_gradient(const std::vector<double>& y,
                                       const std::vector<double>& m, const SymMatrix& cov);

/// Scales the descent direction d = -g to the step that minimizes the squared
/// M-distance along the line m + t d.
GradientScaling scale_gradient(const std::vector<double>& y, const std::vector<double>& m,
                               const SymMatrix& cov, const std::vector<double>& g);

}  // namespace corrviz::stats
