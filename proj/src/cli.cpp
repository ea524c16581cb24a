#include "corrviz/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrviz/examples.hpp"
#include "corrviz/ingest.hpp"
#include "corrviz/render.hpp"

namespace corrviz::cli {

namespace {

using render::PlotKind;
using render::SceneOptions;
using render::StyleConfig;
using stats::DataSet;

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + tmp);
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

StyleConfig load_style(const std::string& explicit_path) {
    StyleConfig style;
    std::string path = explicit_path;
    if (path.empty()) {
        if (const char* env = std::getenv("CORRVIZ_STYLE")) path = env;
    }
    if (path.empty()) return style;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open style file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("style file " + path + ": " + e.what());
    }
    auto get = [&](const char* key, double& target) {
        if (j.contains(key)) target = j[key].get<double>();
    };
    get("width", style.width);
    get("height", style.height);
    get("margin_left", style.margin_left);
    get("margin_right", style.margin_right);
    get("margin_top", style.margin_top);
    get("margin_bottom", style.margin_bottom);
    get("stroke_width", style.stroke_width);
    get("hatch_spacing", style.hatch_spacing);
    get("font_size", style.font_size);
    get("marker_radius", style.marker_radius);
    get("triangle_half_width", style.triangle_half_width);
    get("band_width_fraction", style.band_width_fraction);
    return style;
}

std::size_t model_index_by_name(const DataSet& d, const std::string& name) {
    if (name.empty()) {
        if (d.models.empty()) throw std::runtime_error("dataset has no models");
        return 0;
    }
    for (std::size_t i = 0; i < d.models.size(); ++i) {
        if (d.models[i].name == name) return i;
    }
    throw std::runtime_error("no model named '" + name + "' in dataset");
}

struct PlotArgs {
    std::string input;
    std::string output;
    std::string policy = "median";
    std::size_t n_components = 1;
    bool no_corrlines = false;
    bool no_conditional = false;
    std::string lines_on = "remaining";
    bool all_pairs = false;
    std::string model;
    std::string style_path;
};

void add_plot_options(CLI::App* cmd, PlotArgs& a, bool needs_model = false) {
    cmd->add_option("-i,--input", a.input, "input dataset (JSON or CSV)")->required();
    cmd->add_option("-o,--output", a.output, "output SVG file")->required();
    cmd->add_option("--policy", a.policy, "target eigenvalue policy")
        ->check(CLI::IsMember({"second", "median", "smallest"}));
    cmd->add_option("--n-components", a.n_components, "number of reduced components");
    cmd->add_flag("--no-corrlines", a.no_corrlines, "suppress correlation lines");
    cmd->add_flag("--no-conditional", a.no_conditional, "suppress conditional markers");
    cmd->add_option("--lines-on", a.lines_on, "attach correlation lines to")
        ->check(CLI::IsMember({"remaining", "full"}));
    cmd->add_flag("--all-pairs", a.all_pairs, "correlation lines for all pairs");
    cmd->add_option("--style", a.style_path, "style file (JSON), overrides CORRVIZ_STYLE");
    auto* opt = cmd->add_option("--model", a.model, "model selection by name");
    if (needs_model) (void)opt;
}

SceneOptions scene_options(const PlotArgs& a) {
    SceneOptions opts;
    opts.policy = stats::policy_from_string(a.policy);
    opts.n_components = a.n_components;
    opts.show_corrlines = !a.no_corrlines;
    opts.show_conditional = !a.no_conditional;
    opts.lines_on = a.lines_on == "full" ? render::LinesOn::full : render::LinesOn::remaining;
    opts.all_pairs = a.all_pairs;
    return opts;
}

nlohmann::json gof_json(const DataSet& d) {
    nlohmann::json out;
    out["n_points"] = d.size();
    out["models"] = nlohmann::json::array();
    for (std::size_t i = 0; i < d.models.size(); ++i) {
        const auto rep = stats::gof(d.y, d.models[i].values, d.cov);
        out["models"].push_back({{"name", d.models[i].name},
                                 {"d2", rep.d2},
                                 {"dof", rep.dof},
                                 {"p_value", rep.p_value}});
    }
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"corrviz: plotting and statistics for correlated data"};
    app.require_subcommand(1);

    PlotArgs pc, classic, corrlines, hinton, heatmap, pairwise, ratio;
    auto* cmd_pc = app.add_subcommand("plot-pc", "principal component plot");
    add_plot_options(cmd_pc, pc);
    auto* cmd_classic = app.add_subcommand("plot-classic", "plain error-bar plot");
    add_plot_options(cmd_classic, classic);
    auto* cmd_corrlines = app.add_subcommand("plot-corrlines", "plot with correlation lines");
    add_plot_options(cmd_corrlines, corrlines);
    auto* cmd_hinton = app.add_subcommand("plot-hinton", "Hinton diagram of the correlation");
    add_plot_options(cmd_hinton, hinton);
    auto* cmd_heatmap =
        app.add_subcommand("plot-heatmap", "grayscale heatmap of the correlation");
    add_plot_options(cmd_heatmap, heatmap);
    auto* cmd_pairwise = app.add_subcommand("plot-pairwise", "pairwise ellipse grid");
    add_plot_options(cmd_pairwise, pairwise);
    auto* cmd_ratio = app.add_subcommand("plot-ratio", "data/model ratio with gradient");
    add_plot_options(cmd_ratio, ratio, true);

    std::string stats_input, stats_output;
    auto* cmd_stats = app.add_subcommand("stats", "goodness of fit per model");
    cmd_stats->add_option("-i,--input", stats_input, "input dataset")->required();
    cmd_stats->add_option("-o,--output", stats_output, "write the JSON report to a file");

    std::string gen_kind, gen_output;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 1;
    auto* cmd_gen = app.add_subcommand("generate", "generate an illustrative dataset");
    cmd_gen->add_option("kind", gen_kind, "example kind")
        ->required()
        ->check(CLI::IsMember({"three_point_demo", "uncorrelated", "sum_constrained",
                               "single_component", "two_disjoint", "three_overlapping"}));
    cmd_gen->add_option("-n,--n", gen_n, "number of points (kind-specific default)");
    cmd_gen->add_option("--seed", gen_seed, "seed for the central values");
    cmd_gen->add_option("-o,--output", gen_output, "output dataset file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_gen->parsed()) {
            examples::ExampleSpec spec;
            spec.kind = examples::kind_from_string(gen_kind);
            spec.n_points = gen_n;
            if (gen_n == 0) {
                spec.n_points = spec.kind == examples::Kind::three_overlapping ? 8
                                : spec.kind == examples::Kind::two_disjoint   ? 6
                                : spec.kind == examples::Kind::three_point_demo ? 3
                                                                                : 5;
            }
            spec.seed = gen_seed;
            const DataSet d = examples::generate(spec);
            const auto fmt = gen_output.size() >= 4 &&
                                     gen_output.substr(gen_output.size() - 4) == ".csv"
                                 ? ingest::Format::csv
                                 : ingest::Format::json;
            write_file_atomic(gen_output, ingest::save_dataset(d, fmt));
            return 0;
        }

        if (cmd_stats->parsed()) {
            const DataSet d = ingest::load_dataset_file(stats_input);
            const nlohmann::json j = gof_json(d);
            for (const auto& m : j["models"]) {
                out << m["name"].get<std::string>() << ": d2 = " << m["d2"].get<double>()
                    << ", dof = " << m["dof"].get<std::size_t>()
                    << ", p = " << m["p_value"].get<double>() << "\n";
            }
            out << j.dump(2) << "\n";
            if (!stats_output.empty()) write_file_atomic(stats_output, j.dump(2) + "\n");
            return 0;
        }

        const std::pair<CLI::App*, PlotArgs*> plots[] = {
            {cmd_pc, &pc},           {cmd_classic, &classic}, {cmd_corrlines, &corrlines},
            {cmd_hinton, &hinton},   {cmd_heatmap, &heatmap}, {cmd_pairwise, &pairwise},
            {cmd_ratio, &ratio},
        };
        for (const auto& [cmd, a] : plots) {
            if (!cmd->parsed()) continue;
            const DataSet d = ingest::load_dataset_file(a->input);
            const StyleConfig style = load_style(a->style_path);
            const SceneOptions opts = scene_options(*a);
            std::string svg;

            if (cmd == cmd_hinton || cmd == cmd_heatmap) {
                const auto decomp = stats::correlation_from_covariance(d.cov);
                svg = render::render_matrix(decomp.correlation,
                                            cmd == cmd_hinton ? render::MatrixMode::hinton
                                                              : render::MatrixMode::heatmap_gray,
                                            style);
            } else if (cmd == cmd_pairwise) {
                const auto decomp = stats::correlation_from_covariance(d.cov);
                const std::size_t nc = std::min(opts.n_components, d.size() - 1);
                const auto reduced = stats::reduce_components(decomp, nc, opts.policy);
                svg = render::render_pairwise_grid(
                    geometry::pairwise_ellipse_grid(d, decomp, reduced), style);
            } else if (cmd == cmd_ratio) {
                const std::size_t idx = model_index_by_name(d, a->model);
                svg = render::render_ratio_plot(render::build_ratio_scene(d, idx, opts), style);
            } else {
                const PlotKind kind = cmd == cmd_pc          ? PlotKind::pc
                                      : cmd == cmd_corrlines ? PlotKind::corrlines
                                                             : PlotKind::classic;
                svg = render::render_pc_plot(render::build_scene(d, kind, opts), style);
            }
            write_file_atomic(a->output, svg);
            return 0;
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const ingest::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace corrviz::cli
