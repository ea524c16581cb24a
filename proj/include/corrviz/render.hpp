#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corrviz/geometry.hpp"

namespace corrviz::render {

using geometry::PairEllipses;
using stats::DataSet;
using stats::SymMatrix;
using stats::TargetPolicy;

class EmptyScene : public std::runtime_error {
public:
    explicit EmptyScene(const std::string& what) : std::runtime_error(what) {}
};

struct LegendEntry {
    std::string name;
    double d2 = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
    std::optional<double> endpoint_d2;
};

struct ModelCurve {
    std::string name;
    std::vector<double> values;
};

struct GradientArrow {
    std::size_t point = 0;
    double from_y = 0.0;
    double to_y = 0.0;
    bool suppressed = false;  // zero-length arrows are not drawn
};

/// Resolved glyphs in data coordinates plus axis metadata. Style tags only;
/// no pixel geometry.
struct PlotScene {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;  // full marginal error bars
    std::vector<geometry::HatchBand> bands;
    std::vector<geometry::CorrelationLinePair> corr_lines;
    std::vector<geometry::TriangleMarker> triangles;
    std::vector<ModelCurve> models;
    std::vector<GradientArrow> arrows;
    std::vector<LegendEntry> legend;
    std::string xlabel = "x";
    std::string ylabel = "y";
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    std::optional<double> reference_line;  // ratio plots draw y = 1
};

struct StyleConfig {
    double width = 640.0;
    double height = 480.0;
    double margin_left = 64.0;
    double margin_right = 16.0;
    double margin_top = 16.0;
    double margin_bottom = 48.0;
    double stroke_width = 1.2;
    double hatch_spacing = 6.0;
    double hatch_angle_positive = 45.0;   // degrees; the two orientations must
    double hatch_angle_negative = 135.0;  // stay distinct under grayscale
    double font_size = 12.0;
    double marker_radius = 2.5;
    double triangle_half_width = 5.0;   // px
    double band_width_fraction = 0.7;   // of the minimum x spacing
    double gray_ramp_lo = 0.0;          // lightness at c = -1
    double gray_ramp_hi = 1.0;          // lightness at c = +1
};

enum class MatrixMode { heatmap_gray, hinton };

enum class PlotKind { classic, corrlines, pc };

enum class LinesOn { remaining, full };

struct SceneOptions {
    TargetPolicy policy = TargetPolicy::median;
    std::size_t n_components = 1;
    bool show_corrlines = true;
    bool show_conditional = true;
    LinesOn lines_on = LinesOn::remaining;
    bool all_pairs = false;  // correlation lines for all pairs, not only neighbours
    double corrline_auto_omit = 0.05;  // omit lines when max |K_ij| falls below
};

/// Assembles a scene for the classic, correlation-line, or principal-component
/// plot style from a dataset.
PlotScene build_scene(const DataSet& dataset, PlotKind kind, const SceneOptions& opts);

/// Assembles a ratio scene: data over the selected model, with the scaled
/// M-distance gradient arrows for that model.
PlotScene build_ratio_scene(const DataSet& dataset, std::size_t model_index,
                            const SceneOptions& opts);

std::string render_pc_plot(const PlotScene& scene, const StyleConfig& style);
std::string render_matrix(const SymMatrix& c, MatrixMode mode, const StyleConfig& style);
std::string render_pairwise_grid(const std::vector<PairEllipses>& grid,
                                 const StyleConfig& style);
std::string render_ratio_plot(const PlotScene& scene, const StyleConfig& style);

}  // namespace corrviz::render
