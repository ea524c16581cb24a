#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "corrviz/render.hpp"

namespace corrviz::render {

namespace {

std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // drop negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt17(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string gray_hex(double lightness) {
    const int v = static_cast<int>(std::lround(std::clamp(lightness, 0.0, 1.0) * 255.0));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", v, v, v);
    return buf;
}

// Linear map from data coordinates to pixels (y axis flipped).
struct Mapper {
    double x0, x1, y0, y1;      // data ranges
    double pl, pr, pt, pb;      // pixel box
    double px(double x) const { return pl + (x - x0) / (x1 - x0) * (pr - pl); }
    double py(double y) const { return pt + (y1 - y) / (y1 - y0) * (pb - pt); }
};

// 1-2-5 tick ladder.
std::vector<double> ticks(double lo, double hi, int target = 5) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double f : {1.0, 2.0, 5.0}) {
        if (f * mag >= raw) {
            step = f * mag;
            break;
        }
    }
    std::vector<double> out;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 0.5 * step * 1e-9; t += step) {
        double v = t;
        if (std::abs(v) < 1e-12 * step) v = 0.0;
        out.push_back(v);
    }
    return out;
}

const char* svg_header =
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ";

void open_svg(std::ostringstream& os, const StyleConfig& s, double width, double height) {
    os << svg_header << "width=\"" << fmt(width) << "\" height=\"" << fmt(height)
       << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
       << "\" fill=\"#ffffff\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"" << fmt(s.font_size) << "\">\n";
}

void close_svg(std::ostringstream& os) { os << "</g>\n</svg>\n"; }

void draw_axes(std::ostringstream& os, const Mapper& map, const StyleConfig& s,
               const std::string& xlabel, const std::string& ylabel) {
    os << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<rect x=\"" << fmt(map.pl) << "\" y=\"" << fmt(map.pt) << "\" width=\""
       << fmt(map.pr - map.pl) << "\" height=\"" << fmt(map.pb - map.pt) << "\"/>\n";
    for (double t : ticks(map.x0, map.x1)) {
        const double x = map.px(t);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(map.pb) << "\" x2=\"" << fmt(x)
           << "\" y2=\"" << fmt(map.pb - 5.0) << "\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(map.pb + s.font_size + 4.0)
           << "\" text-anchor=\"middle\" fill=\"#000000\" stroke=\"none\">" << fmt(t)
           << "</text>\n";
    }
    for (double t : ticks(map.y0, map.y1)) {
        const double y = map.py(t);
        os << "<line x1=\"" << fmt(map.pl) << "\" y1=\"" << fmt(y) << "\" x2=\""
           << fmt(map.pl + 5.0) << "\" y2=\"" << fmt(y) << "\"/>\n";
        os << "<text x=\"" << fmt(map.pl - 6.0) << "\" y=\"" << fmt(y + 0.35 * s.font_size)
           << "\" text-anchor=\"end\" fill=\"#000000\" stroke=\"none\">" << fmt(t)
           << "</text>\n";
    }
    os << "<text x=\"" << fmt(0.5 * (map.pl + map.pr)) << "\" y=\""
       << fmt(map.pb + 2.4 * s.font_size) << "\" text-anchor=\"middle\" fill=\"#000000\" "
          "stroke=\"none\">"
       << xml_escape(xlabel) << "</text>\n";
    os << "<text x=\"" << fmt(map.pl - 3.6 * s.font_size) << "\" y=\""
       << fmt(0.5 * (map.pt + map.pb)) << "\" text-anchor=\"middle\" fill=\"#000000\" "
          "stroke=\"none\" transform=\"rotate(-90 "
       << fmt(map.pl - 3.6 * s.font_size) << " " << fmt(0.5 * (map.pt + map.pb)) << ")\">"
       << xml_escape(ylabel) << "</text>\n";
    os << "</g>\n";
}

const char* model_dashes(std::size_t k) {
    static const char* dashes[] = {"", "7,4", "2,3", "9,3,2,3"};
    return dashes[k % 4];
}

std::string legend_text(const LegendEntry& e) {
    std::string line = e.name + ": d² = " + fmt3(e.d2) + " / dof = " +
                       std::to_string(e.dof) + ", p = " + fmt3(e.p_value);
    if (e.endpoint_d2) line += ", endpoint d² = " + fmt3(*e.endpoint_d2);
    return line;
}

std::string render_scene(const PlotScene& scene, const StyleConfig& style) {
    if (scene.y.empty()) throw EmptyScene("render: scene has no data points");

    std::ostringstream os;
    Mapper map{scene.x_min, scene.x_max, scene.y_min, scene.y_max,
               style.margin_left, style.width - style.margin_right,
               style.margin_top, style.height - style.margin_bottom};

    const bool any_band = std::any_of(scene.bands.begin(), scene.bands.end(),
                                      [](const auto& b) { return !b.degenerate; });

    std::ostringstream body;
    if (any_band) {
        body << "<defs>\n";
        for (const auto& [pid, angle] :
             {std::pair{"hatch-pos", style.hatch_angle_positive},
              std::pair{"hatch-neg", style.hatch_angle_negative}}) {
            body << "<pattern id=\"" << pid << "\" patternUnits=\"userSpaceOnUse\" width=\""
                 << fmt(style.hatch_spacing) << "\" height=\"" << fmt(style.hatch_spacing)
                 << "\" patternTransform=\"rotate(" << fmt(angle) << ")\">\n"
                 << "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"" << fmt(style.hatch_spacing)
                 << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n</pattern>\n";
        }
        body << "</defs>\n";
    }

    // band half-width in data units, from the minimum x spacing
    double min_dx = 1.0;
    if (scene.x.size() > 1) {
        min_dx = scene.x[1] - scene.x[0];
        for (std::size_t i = 2; i < scene.x.size(); ++i)
            min_dx = std::min(min_dx, scene.x[i] - scene.x[i - 1]);
    }
    const double half_w = 0.5 * style.band_width_fraction * min_dx;

    body << "<g id=\"bands\">\n";
    for (const auto& b : scene.bands) {
        if (b.degenerate) continue;
        const double xl = map.px(scene.x[b.point] - half_w);
        const double xr = map.px(scene.x[b.point] + half_w);
        const double ya = map.py(std::max(b.inner_edge, b.outer_edge));
        const double yb = map.py(std::min(b.inner_edge, b.outer_edge));
        const char* pattern =
            b.hatch_class == geometry::HatchClass::component_positive ? "hatch-pos"
                                                                      : "hatch-neg";
        body << "<rect id=\"band-" << b.point << "-"
             << (b.side == geometry::Side::above ? "above" : "below") << "-" << b.component
             << "\" x=\"" << fmt(xl) << "\" y=\"" << fmt(ya) << "\" width=\"" << fmt(xr - xl)
             << "\" height=\"" << fmt(yb - ya) << "\" fill=\"url(#" << pattern
             << ")\" stroke=\"#000000\" stroke-width=\"0.5\"/>\n";
    }
    body << "</g>\n";

    body << "<g id=\"corrlines\" stroke=\"#555555\" stroke-width=\"0.9\">\n";
    for (const auto& cl : scene.corr_lines) {
        const char* tag[] = {"a", "b"};
        const std::array<geometry::Point2, 2>* segs[] = {&cl.segment_a, &cl.segment_b};
        for (int s = 0; s < 2; ++s) {
            body << "<line id=\"corrline-" << cl.i << "-" << cl.j << "-" << tag[s]
                 << "\" x1=\"" << fmt(map.px((*segs[s])[0].x)) << "\" y1=\""
                 << fmt(map.py((*segs[s])[0].y)) << "\" x2=\"" << fmt(map.px((*segs[s])[1].x))
                 << "\" y2=\"" << fmt(map.py((*segs[s])[1].y)) << "\"/>\n";
        }
    }
    body << "</g>\n";

    if (scene.reference_line) {
        const double y = map.py(*scene.reference_line);
        body << "<g id=\"reference\">\n<line x1=\"" << fmt(map.pl) << "\" y1=\"" << fmt(y)
             << "\" x2=\"" << fmt(map.pr) << "\" y2=\"" << fmt(y)
             << "\" stroke=\"#888888\" stroke-width=\"0.8\"/>\n</g>\n";
    }

    body << "<g id=\"models\" fill=\"none\" stroke=\"#000000\" stroke-width=\""
         << fmt(style.stroke_width) << "\">\n";
    for (std::size_t k = 0; k < scene.models.size(); ++k) {
        body << "<polyline id=\"model-" << k << "\"";
        if (model_dashes(k)[0] != '\0') body << " stroke-dasharray=\"" << model_dashes(k) << "\"";
        body << " points=\"";
        for (std::size_t i = 0; i < scene.models[k].values.size(); ++i) {
            if (i) body << " ";
            body << fmt(map.px(scene.x[i])) << "," << fmt(map.py(scene.models[k].values[i]));
        }
        body << "\"/>\n";
    }
    body << "</g>\n";

    body << "<g id=\"errorbars\" stroke=\"#000000\" stroke-width=\""
         << fmt(style.stroke_width) << "\">\n";
    for (std::size_t i = 0; i < scene.y.size(); ++i) {
        const double x = map.px(scene.x[i]);
        const double ytop = map.py(scene.y[i] + scene.sigma[i]);
        const double ybot = map.py(scene.y[i] - scene.sigma[i]);
        body << "<g id=\"point-" << i << "\">\n"
             << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(ytop) << "\" x2=\"" << fmt(x)
             << "\" y2=\"" << fmt(ybot) << "\"/>\n"
             << "<line x1=\"" << fmt(x - 4.0) << "\" y1=\"" << fmt(ytop) << "\" x2=\""
             << fmt(x + 4.0) << "\" y2=\"" << fmt(ytop) << "\"/>\n"
             << "<line x1=\"" << fmt(x - 4.0) << "\" y1=\"" << fmt(ybot) << "\" x2=\""
             << fmt(x + 4.0) << "\" y2=\"" << fmt(ybot) << "\"/>\n"
             << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(map.py(scene.y[i]))
             << "\" r=\"" << fmt(style.marker_radius) << "\" fill=\"#000000\"/>\n"
             << "</g>\n";
    }
    body << "</g>\n";

    body << "<g id=\"triangles\" fill=\"#000000\">\n";
    for (const auto& t : scene.triangles) {
        const double x = map.px(scene.x[t.point]);
        const double w = style.triangle_half_width;
        const double h = 0.8 * style.triangle_half_width;
        const double ya = map.py(t.apex_above);
        const double yb = map.py(t.apex_below);
        body << "<polygon id=\"cond-" << t.point << "-above\" points=\"" << fmt(x) << ","
             << fmt(ya) << " " << fmt(x - w) << "," << fmt(ya - h) << " " << fmt(x + w)
             << "," << fmt(ya - h) << "\"/>\n";
        body << "<polygon id=\"cond-" << t.point << "-below\" points=\"" << fmt(x) << ","
             << fmt(yb) << " " << fmt(x - w) << "," << fmt(yb + h) << " " << fmt(x + w)
             << "," << fmt(yb + h) << "\"/>\n";
    }
    body << "</g>\n";

    body << "<g id=\"arrows\" stroke=\"#000000\" stroke-width=\"1\">\n";
    for (const auto& a : scene.arrows) {
        if (a.suppressed) continue;
        const double x = map.px(scene.x[a.point]);
        const double y1 = map.py(a.from_y);
        const double y2 = map.py(a.to_y);
        const double dir = (y2 > y1) ? 1.0 : -1.0;
        body << "<g id=\"arrow-" << a.point << "\">\n"
             << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x)
             << "\" y2=\"" << fmt(y2) << "\"/>\n"
             << "<polygon fill=\"#000000\" stroke=\"none\" points=\"" << fmt(x) << ","
             << fmt(y2) << " " << fmt(x - 3.0) << "," << fmt(y2 - dir * 6.0) << " "
             << fmt(x + 3.0) << "," << fmt(y2 - dir * 6.0) << "\"/>\n"
             << "</g>\n";
    }
    body << "</g>\n";

    body << "<g id=\"legend\" fill=\"#000000\">\n";
    for (std::size_t k = 0; k < scene.legend.size(); ++k) {
        body << "<text x=\"" << fmt(map.pl + 10.0) << "\" y=\""
             << fmt(map.pt + (1.2 + 1.3 * static_cast<double>(k)) * style.font_size) << "\">"
             << xml_escape(legend_text(scene.legend[k])) << "</text>\n";
    }
    body << "</g>\n";

    open_svg(os, style, style.width, style.height);
    os << body.str();
    draw_axes(os, map, style, scene.xlabel, scene.ylabel);
    close_svg(os);
    return os.str();
}

}  // namespace

std::string render_pc_plot(const PlotScene& scene, const StyleConfig& style) {
    return render_scene(scene, style);
}

std::string render_ratio_plot(const PlotScene& scene, const StyleConfig& style) {
    if (scene.legend.empty() ||
        std::none_of(scene.legend.begin(), scene.legend.end(),
                     [](const LegendEntry& e) { return e.endpoint_d2.has_value(); })) {
        throw EmptyScene("render_ratio_plot: no gradient endpoint available");
    }
    return render_scene(scene, style);
}

std::string render_matrix(const SymMatrix& c, MatrixMode mode, const StyleConfig& style) {
    const std::size_t n = c.size();
    const double side = std::min(style.width - style.margin_left - style.margin_right,
                                 style.height - style.margin_top - style.margin_bottom);
    const double cell = side / static_cast<double>(n);
    const double x0 = style.margin_left;
    const double y0 = style.margin_top;

    std::ostringstream os;
    open_svg(os, style, style.width, style.height);

    if (mode == MatrixMode::heatmap_gray) {
        os << "<g id=\"cells\" stroke=\"none\">\n";
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double lightness =
                    style.gray_ramp_lo +
                    0.5 * (c(i, j) + 1.0) * (style.gray_ramp_hi - style.gray_ramp_lo);
                os << "<rect id=\"cell-" << i << "-" << j << "\" x=\""
                   << fmt(x0 + static_cast<double>(j) * cell) << "\" y=\""
                   << fmt(y0 + static_cast<double>(i) * cell) << "\" width=\"" << fmt(cell)
                   << "\" height=\"" << fmt(cell) << "\" fill=\"" << gray_hex(lightness)
                   << "\"/>\n";
            }
        }
        os << "</g>\n";
    } else {
        os << "<rect id=\"hinton-bg\" x=\"" << fmt(x0) << "\" y=\"" << fmt(y0)
           << "\" width=\"" << fmt(side) << "\" height=\"" << fmt(side)
           << "\" fill=\"#808080\"/>\n";
        os << "<g id=\"cells\" stroke=\"none\">\n";
        for (const auto& cellspec : geometry::hinton_cells(c)) {
            const double cx = x0 + cellspec.center.x * cell;
            const double cy = y0 + cellspec.center.y * cell;
            const double r = cellspec.radius_fraction * 0.5 * cell;
            const char* fill = cellspec.sign == geometry::CellSign::positive   ? "#ffffff"
                               : cellspec.sign == geometry::CellSign::negative ? "#000000"
                                                                               : "#808080";
            os << "<circle id=\"hinton-" << cellspec.i << "-" << cellspec.j << "\" cx=\""
               << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"" << fmt17(r) << "\" fill=\""
               << fill << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(side)
       << "\" height=\"" << fmt(side)
       << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    close_svg(os);
    return os.str();
}

std::string render_pairwise_grid(const std::vector<PairEllipses>& grid,
                                 const StyleConfig& style) {
    if (grid.empty()) throw EmptyScene("render_pairwise_grid: no pairs");
    const std::size_t npanels = grid.size();
    const std::size_t ncols =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(npanels))));
    const std::size_t nrows = (npanels + ncols - 1) / ncols;
    const double panel = 180.0;
    const double gap = 14.0;
    const double width = static_cast<double>(ncols) * (panel + gap) + gap;
    const double height = static_cast<double>(nrows) * (panel + gap) + gap;

    std::ostringstream os;
    open_svg(os, style, width, height);

    const double rad2deg = 180.0 / std::numbers::pi;
    for (std::size_t p = 0; p < npanels; ++p) {
        const auto& pe = grid[p];
        const double px0 = gap + static_cast<double>(p % ncols) * (panel + gap);
        const double py0 = gap + static_cast<double>(p / ncols) * (panel + gap);
        const double cx = px0 + 0.5 * panel;
        const double cy = py0 + 0.5 * panel;

        double extent = 0.0;
        for (const auto* e : {&pe.full_marginal, &pe.remaining, &pe.conditional_slice}) {
            extent = std::max(extent, e->semi_major);
        }
        if (extent <= 0.0) extent = 1.0;
        const double scale = (0.5 * panel - 10.0) / extent;

        os << "<g id=\"panel-" << pe.i << "-" << pe.j << "\">\n";
        os << "<rect x=\"" << fmt(px0) << "\" y=\"" << fmt(py0) << "\" width=\"" << fmt(panel)
           << "\" height=\"" << fmt(panel)
           << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"0.8\"/>\n";
        os << "<line x1=\"" << fmt(px0) << "\" y1=\"" << fmt(cy) << "\" x2=\""
           << fmt(px0 + panel) << "\" y2=\"" << fmt(cy)
           << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
        os << "<line x1=\"" << fmt(cx) << "\" y1=\"" << fmt(py0) << "\" x2=\"" << fmt(cx)
           << "\" y2=\"" << fmt(py0 + panel)
           << "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";

        const std::pair<const geometry::EllipseSpec*, const char*> specs[] = {
            {&pe.full_marginal, ""},
            {&pe.remaining, "1.5,2.5"},
            {&pe.conditional_slice, "6,3"},
        };
        for (const auto& [e, dash] : specs) {
            os << "<ellipse cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" rx=\""
               << fmt(e->semi_major * scale) << "\" ry=\"" << fmt(e->semi_minor * scale)
               << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"";
            if (dash[0] != '\0') os << " stroke-dasharray=\"" << dash << "\"";
            // SVG y points down, so the data-space rotation flips sign
            os << " transform=\"rotate(" << fmt(-e->angle * rad2deg) << " " << fmt(cx) << " "
               << fmt(cy) << ")\"/>\n";
        }
        os << "<text x=\"" << fmt(px0 + 5.0) << "\" y=\"" << fmt(py0 + style.font_size + 2.0)
           << "\" fill=\"#000000\">Δy" << pe.i << " vs Δy" << pe.j << "</text>\n";
        os << "</g>\n";
    }
    close_svg(os);
    return os.str();
}

}  // namespace corrviz::render
