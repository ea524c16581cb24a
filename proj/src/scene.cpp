#include <algorithm>
#include <cmath>

#include "corrviz/render.hpp"

namespace corrviz::render {

namespace {

void expand(double& lo, double& hi, double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
}

void finish_ranges(PlotScene& scene) {
    double xlo = scene.x.front(), xhi = scene.x.back();
    for (double v : scene.x) expand(xlo, xhi, v);
    double ylo = scene.y.front(), yhi = scene.y.front();
    for (std::size_t i = 0; i < scene.y.size(); ++i) {
        expand(ylo, yhi, scene.y[i] - scene.sigma[i]);
        expand(ylo, yhi, scene.y[i] + scene.sigma[i]);
    }
    for (const auto& b : scene.bands) {
        expand(ylo, yhi, b.inner_edge);
        expand(ylo, yhi, b.outer_edge);
    }
    for (const auto& t : scene.triangles) {
        expand(ylo, yhi, t.apex_above);
        expand(ylo, yhi, t.apex_below);
    }
    for (const auto& m : scene.models) {
        for (double v : m.values) expand(ylo, yhi, v);
    }
    for (const auto& a : scene.arrows) {
        expand(ylo, yhi, a.from_y);
        expand(ylo, yhi, a.to_y);
    }
    if (scene.reference_line) expand(ylo, yhi, *scene.reference_line);

    const double xspan = (xhi > xlo) ? (xhi - xlo) : 1.0;
    const double yspan = (yhi > ylo) ? (yhi - ylo) : 1.0;
    scene.x_min = xlo - 0.06 * xspan;
    scene.x_max = xhi + 0.06 * xspan;
    scene.y_min = ylo - 0.08 * yspan;
    scene.y_max = yhi + 0.08 * yspan;
}

// Correlation lines between points, attached to the error bars given by
// `sigmas` with the correlations of `corr`.
std::vector<geometry::CorrelationLinePair> make_corr_lines(
    const std::vector<double>& x, const std::vector<double>& y,
    const std::vector<double>& sigmas, const SymMatrix& corr, bool all_pairs) {
    std::vector<geometry::CorrelationLinePair> out;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t jmax = all_pairs ? n : i + 2;
        for (std::size_t j = i + 1; j < jmax; ++j) {
            double rho = corr(i, j);
            rho = std::clamp(rho, -1.0, 1.0);
            auto pair = geometry::correlation_line_endpoints(x[i], y[i], sigmas[i], x[j],
                                                            y[j], sigmas[j], rho);
            pair.i = i;
            pair.j = j;
            out.push_back(pair);
        }
    }
    return out;
}

double max_offdiag_abs(const SymMatrix& m) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j) v = std::max(v, std::abs(m(i, j)));
    return v;
}

}  // namespace

PlotScene build_scene(const DataSet& dataset, PlotKind kind, const SceneOptions& opts) {
    const std::size_t n = dataset.size();
    if (n == 0) throw EmptyScene("build_scene: empty dataset");

    PlotScene scene;
    scene.x = dataset.x;
    scene.y = dataset.y;
    scene.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) scene.sigma[i] = dataset.sigma(i);
    if (!dataset.xlabel.empty()) scene.xlabel = dataset.xlabel;
    if (!dataset.ylabel.empty()) scene.ylabel = dataset.ylabel;

    for (const auto& model : dataset.models) {
        scene.models.push_back(ModelCurve{model.name, model.values});
        const auto rep = stats::gof(dataset.y, model.values, dataset.cov);
        scene.legend.push_back(LegendEntry{model.name, rep.d2, rep.dof, rep.p_value, {}});
    }

    if (kind == PlotKind::classic || n < 2) {
        finish_ranges(scene);
        return scene;
    }

    const auto decomp = stats::correlation_from_covariance(dataset.cov);

    if (kind == PlotKind::corrlines) {
        if (opts.show_corrlines) {
            scene.corr_lines = make_corr_lines(scene.x, scene.y, scene.sigma,
                                               decomp.correlation, opts.all_pairs);
        }
        finish_ranges(scene);
        return scene;
    }

    // principal component plot
    const std::size_t nc = std::min(opts.n_components, n - 1);
    const auto reduced = stats::reduce_components(decomp, nc, opts.policy);
    scene.bands = geometry::hatch_bands(scene.y, scene.sigma, decomp, reduced);

    if (opts.show_corrlines) {
        if (opts.lines_on == LinesOn::full) {
            if (max_offdiag_abs(decomp.correlation) >= opts.corrline_auto_omit) {
                scene.corr_lines = make_corr_lines(scene.x, scene.y, scene.sigma,
                                                   decomp.correlation, opts.all_pairs);
            }
        } else if (max_offdiag_abs(reduced.remaining) >= opts.corrline_auto_omit) {
            std::vector<double> inner(n);
            for (std::size_t i = 0; i < n; ++i) {
                inner[i] = scene.sigma[i] * std::sqrt(std::max(reduced.remaining(i, i), 0.0));
            }
            // K normalized back to a correlation for the line heights
            SymMatrix kcorr(n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    const double denom =
                        std::sqrt(reduced.remaining(i, i) * reduced.remaining(j, j));
                    kcorr.set(i, j, denom > 0.0 ? reduced.remaining(i, j) / denom : 0.0);
                }
            }
            scene.corr_lines = make_corr_lines(scene.x, scene.y, inner, kcorr, opts.all_pairs);
        }
    }

    if (opts.show_conditional) {
        const auto sc = stats::conditional_sigmas(dataset.cov);
        scene.triangles = geometry::conditional_markers(scene.y, sc);
    }

    finish_ranges(scene);
    return scene;
}

PlotScene build_ratio_scene(const DataSet& dataset, std::size_t model_index,
                            const SceneOptions& opts) {
    const DataSet ratio = geometry::ratio_view(dataset, model_index);
    PlotScene scene = build_scene(ratio, PlotKind::pc, opts);
    scene.reference_line = 1.0;
    scene.ylabel = "data / model";

    const std::vector<double>& mref = ratio.models[model_index].values;
    auto& entry = scene.legend[model_index];
    try {
        const auto grad = stats::mdistance_gradient(ratio.y, mref, ratio.cov);
        const auto scaled = stats::scale_gradient(ratio.y, mref, ratio.cov, grad);
        entry.endpoint_d2 = scaled.endpoint_d2;
        const double yscale = *std::max_element(scene.sigma.begin(), scene.sigma.end());
        for (std::size_t i = 0; i < ratio.size(); ++i) {
            GradientArrow arrow;
            arrow.point = i;
            arrow.from_y = mref[i];
            arrow.to_y = scaled.endpoint[i];
            arrow.suppressed = std::abs(arrow.to_y - arrow.from_y) < 1e-9 * yscale;
            scene.arrows.push_back(arrow);
        }
    } catch (const stats::ZeroGradient&) {
        entry.endpoint_d2 = entry.d2;  // already at the minimum
    }

    finish_ranges(scene);
    return scene;
}

}  // namespace corrviz::render
