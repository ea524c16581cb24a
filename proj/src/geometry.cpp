#include "corrviz/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace corrviz::geometry {

CorrelationLinePair correlation_line_endpoints(double xi, double yi, double sigma_i,
                                               double xj, double yj, double sigma_j,
                                               double rho) {
    if (sigma_i <= 0.0 || sigma_j <= 0.0) {
        throw std::invalid_argument("correlation_line_endpoints: sigmas must be positive");
    }
    if (std::abs(rho) > 1.0 + 1e-12) {
        throw std::invalid_argument("correlation_line_endpoints: |rho| > 1");
    }
    const double mag = std::abs(rho);
    const double sj_sign = (rho < 0.0) ? -1.0 : 1.0;
    CorrelationLinePair out;
    out.rho = rho;
    out.segment_a = {Point2{xi, yi + mag * sigma_i}, Point2{xj, yj + sj_sign * mag * sigma_j}};
    out.segment_b = {Point2{xi, yi - mag * sigma_i}, Point2{xj, yj - sj_sign * mag * sigma_j}};
    return out;
}

std::vector<HatchBand> hatch_bands(const std::vector<double>& y,
                                   const std::vector<double>& sigmas_full,
                                   const CorrelationDecomposition& decomp,
                                   const ReducedCovariance& reduced) {
    const std::size_t n = y.size();
    const std::size_t nc = reduced.n_components;

    // cumulative normalized marginal variances: diag(K), then K plus each kept
    // component added back in ascending eigenvalue order
    std::vector<double> cum(n);
    for (std::size_t i = 0; i < n; ++i) cum[i] = reduced.remaining(i, i);

    std::vector<HatchBand> bands;
    bands.reserve(2 * n * nc);
    for (std::size_t step = 0; step < nc; ++step) {
        const std::size_t comp = nc - 1 - step;  // smallest kept eigenvalue first
        const SymMatrix& contrib = reduced.contributions[comp];
        const std::vector<double>& u = decomp.eigen.vectors[comp];
        for (std::size_t i = 0; i < n; ++i) {
            const double prev = sigmas_full[i] * std::sqrt(std::max(cum[i], 0.0));
            const double next_var = cum[i] + contrib(i, i);
            const double next = sigmas_full[i] * std::sqrt(std::max(next_var, 0.0));
            const bool degenerate = (next - prev) < 1e-12 * sigmas_full[i];
            const bool positive_elem = u[i] > 0.0;

            HatchBand above;
            above.point = i;
            above.side = Side::above;
            above.inner_edge = y[i] + prev;
            above.outer_edge = y[i] + next;
            above.hatch_class = positive_elem ? HatchClass::component_positive
                                              : HatchClass::component_negative;
            above.component = comp;
            above.degenerate = degenerate;
            bands.push_back(above);

            HatchBand below = above;
            below.side = Side::below;
            below.inner_edge = y[i] - prev;
            below.outer_edge = y[i] - next;
            below.hatch_class = positive_elem ? HatchClass::component_negative
                                              : HatchClass::component_positive;
            bands.push_back(below);

            cum[i] = next_var;
        }
    }
    return bands;
}

std::vector<TriangleMarker> conditional_markers(const std::vector<double>& y,
                                                const std::vector<double>& sigma_cond) {
    if (y.size() != sigma_cond.size()) {
        throw std::invalid_argument("conditional_markers: length mismatch");
    }
    std::vector<TriangleMarker> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        out[i] = TriangleMarker{i, y[i] + sigma_cond[i], y[i] - sigma_cond[i]};
    }
    return out;
}

std::vector<HintonCell> hinton_cells(const SymMatrix& c) {
    const std::size_t n = c.size();
    std::vector<HintonCell> out;
    out.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = c(i, j);
            if (std::abs(v) > 1.0 + 1e-12) {
                throw std::invalid_argument("hinton_cells: |element| > 1 at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            HintonCell cell;
            cell.i = i;
            cell.j = j;
            cell.center = Point2{static_cast<double>(j) + 0.5, static_cast<double>(i) + 0.5};
            cell.radius_fraction = std::sqrt(std::min(std::abs(v), 1.0));
            cell.sign = (std::abs(v) < 1e-15) ? CellSign::zero
                        : (v > 0.0)           ? CellSign::positive
                                              : CellSign::negative;
            out.push_back(cell);
        }
    }
    return out;
}

EllipseSpec ellipse_from_cov2(const SymMatrix& cov2, EllipseStyle style) {
    if (cov2.size() != 2) throw std::invalid_argument("ellipse_from_cov2: need 2x2");
    const auto eig = linalg::eigh_symmetric(cov2);
    const double l1 = eig.values[0];
    const double l2 = eig.values[1];
    if (l1 < 0.0) throw std::invalid_argument("ellipse_from_cov2: not PSD");

    EllipseSpec out;
    out.style = style;
    out.semi_major = std::sqrt(std::max(l1, 0.0));
    out.semi_minor = std::sqrt(std::max(l2, 0.0));
    out.degenerate = l2 <= 1e-12 * l1;

    double angle = std::atan2(eig.vectors[0][1], eig.vectors[0][0]);
    const double pi = std::numbers::pi;
    while (angle < -pi / 2.0) angle += pi;
    while (angle >= pi / 2.0) angle -= pi;
    out.angle = angle;
    return out;
}

std::vector<PairEllipses> pairwise_ellipse_grid(const DataSet& dataset,
                                                const CorrelationDecomposition& decomp,
                                                const ReducedCovariance& reduced) {
    const std::size_t n = dataset.size();
    if (n < 2) throw std::invalid_argument("pairwise_ellipse_grid: need N >= 2");
    const SymMatrix vk = stats::remaining_covariance(decomp.scales, reduced.remaining);

    std::vector<PairEllipses> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            SymMatrix full2(2), rem2(2);
            full2.set(0, 0, dataset.cov(i, i));
            full2.set(0, 1, dataset.cov(i, j));
            full2.set(1, 1, dataset.cov(j, j));
            rem2.set(0, 0, vk(i, i));
            rem2.set(0, 1, vk(i, j));
            rem2.set(1, 1, vk(j, j));
            const SymMatrix cond2 = (n == 2)
                                        ? full2
                                        : stats::conditional_pair_covariance(dataset.cov, i, j);

            PairEllipses pe;
            pe.i = i;
            pe.j = j;
            pe.full_marginal = ellipse_from_cov2(full2, EllipseStyle::full_marginal);
            pe.remaining = ellipse_from_cov2(rem2, EllipseStyle::remaining);
            pe.conditional_slice = ellipse_from_cov2(cond2, EllipseStyle::conditional_slice);
            for (EllipseSpec* e : {&pe.full_marginal, &pe.remaining, &pe.conditional_slice}) {
                e->i = i;
                e->j = j;
            }
            out.push_back(pe);
        }
    }
    return out;
}

DataSet ratio_view(const DataSet& dataset, std::size_t model_index) {
    if (model_index >= dataset.models.size()) {
        throw std::invalid_argument("ratio_view: model index out of range");
    }
    const std::vector<double>& m = dataset.models[model_index].values;
    const std::size_t n = dataset.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] == 0.0) {
            throw ZeroModelValue("ratio_view: model value is zero at point " +
                                 std::to_string(i));
        }
    }
    DataSet out{dataset.x, std::vector<double>(n), SymMatrix(n), {}, dataset.xlabel, ""};
    for (std::size_t i = 0; i < n; ++i) out.y[i] = dataset.y[i] / m[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            out.cov.set(i, j, dataset.cov(i, j) / (m[i] * m[j]));
        }
    }
    for (const stats::Model& model : dataset.models) {
        stats::Model ratio_model{model.name, std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) ratio_model.values[i] = model.values[i] / m[i];
        out.models.push_back(std::move(ratio_model));
    }
    return out;
}

}  // namespace corrviz::geometry
