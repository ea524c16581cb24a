#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "corrviz/cli.hpp"
#include "test_oracles.hpp"

namespace fs = std::filesystem;
namespace cli = corrviz::cli;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("corrviz-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("generate + stats reports the demo paradox") {
    TempDir tmp;
    const auto data = tmp.file("demo.json");
    const auto report = tmp.file("report.json");
    CHECK(run({"generate", "three_point_demo", "-o", data}).code == 0);

    const auto r = run({"stats", "-i", data, "-o", report});
    CHECK(r.code == 0);
    CHECK(r.out.find("M1: d2 = ") != std::string::npos);
    CHECK(r.out.find("dof = 3") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(report));
    REQUIRE(j["models"].size() == 2);
    CHECK(j["n_points"] == 3);
    CHECK(j["models"][0]["name"] == "M1");
    CHECK(j["models"][0]["dof"] == 3);
    // the componentwise-closer model fits worse
    CHECK(j["models"][1]["d2"].get<double>() > j["models"][0]["d2"].get<double>());
    CHECK(j["models"][1]["p_value"].get<double>() < j["models"][0]["p_value"].get<double>());
}

TEST_CASE("plot-pc and plot-classic produce valid, distinct SVG") {
    TempDir tmp;
    const auto data = tmp.file("u.json");
    REQUIRE(run({"generate", "uncorrelated", "-n", "4", "-o", data}).code == 0);

    const auto pc = tmp.file("pc.svg");
    const auto classic = tmp.file("classic.svg");
    CHECK(run({"plot-pc", "-i", data, "-o", pc}).code == 0);
    CHECK(run({"plot-classic", "-i", data, "-o", classic}).code == 0);

    const auto pc_svg = slurp(pc);
    const auto classic_svg = slurp(classic);
    CHECK(oracles::xml_check(pc_svg).empty());
    CHECK(oracles::xml_check(classic_svg).empty());
    CHECK(pc_svg.find("id=\"cond-") != std::string::npos);
    CHECK(classic_svg.find("id=\"cond-") == std::string::npos);
}

TEST_CASE("generate sum_constrained feeds every plot command") {
    TempDir tmp;
    const auto data = tmp.file("sc.json");
    REQUIRE(run({"generate", "sum_constrained", "-n", "5", "--seed", "7", "-o", data}).code ==
            0);
    for (const char* cmd : {"plot-pc", "plot-corrlines", "plot-hinton", "plot-heatmap",
                            "plot-pairwise"}) {
        const auto svg = tmp.file(std::string(cmd) + ".svg");
        CHECK(run({cmd, "-i", data, "-o", svg}).code == 0);
        CHECK(oracles::xml_check(slurp(svg)).empty());
    }
}

TEST_CASE("plot-ratio selects a model by name") {
    TempDir tmp;
    const auto data = tmp.file("demo.json");
    REQUIRE(run({"generate", "three_point_demo", "-o", data}).code == 0);

    const auto svg = tmp.file("ratio.svg");
    CHECK(run({"plot-ratio", "-i", data, "--model", "M2", "-o", svg}).code == 0);
    const auto text = slurp(svg);
    CHECK(oracles::xml_check(text).empty());
    CHECK(text.find("endpoint d²") != std::string::npos);

    CHECK(run({"plot-ratio", "-i", data, "--model", "nope", "-o", svg}).code == 1);
}

TEST_CASE("repeated runs are byte-identical") {
    TempDir tmp;
    const auto data = tmp.file("d.json");
    REQUIRE(run({"generate", "three_overlapping", "-n", "8", "--seed", "3", "-o", data})
                .code == 0);
    const auto a = tmp.file("a.svg");
    const auto b = tmp.file("b.svg");
    REQUIRE(run({"plot-pc", "-i", data, "--n-components", "2", "-o", a}).code == 0);
    REQUIRE(run({"plot-pc", "-i", data, "--n-components", "2", "-o", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("csv output extension selects the format") {
    TempDir tmp;
    const auto csv = tmp.file("d.csv");
    REQUIRE(run({"generate", "uncorrelated", "-n", "3", "-o", csv}).code == 0);
    CHECK(slurp(csv).rfind("x,y,cov0,cov1,cov2", 0) == 0);
    const auto svg = tmp.file("d.svg");
    CHECK(run({"plot-pc", "-i", csv, "-o", svg}).code == 0);
}

TEST_CASE("style file changes the canvas size") {
    TempDir tmp;
    const auto data = tmp.file("d.json");
    REQUIRE(run({"generate", "uncorrelated", "-n", "3", "-o", data}).code == 0);
    const auto style = tmp.file("style.json");
    { std::ofstream(style) << R"({"width": 321, "height": 222})"; }
    const auto svg = tmp.file("d.svg");
    REQUIRE(run({"plot-classic", "-i", data, "--style", style, "-o", svg}).code == 0);
    CHECK(slurp(svg).find("width=\"321\" height=\"222\"") != std::string::npos);
}

TEST_CASE("exit codes distinguish usage and data errors") {
    TempDir tmp;
    // usage errors
    CHECK(run({}).code == 2);
    CHECK(run({"plot-pc"}).code == 2);
    CHECK(run({"generate", "no_such_kind", "-o", tmp.file("x.json")}).code == 2);
    CHECK(run({"plot-pc", "-i", "a", "-o", "b", "--policy", "bogus"}).code == 2);

    // data errors
    const auto bad = tmp.file("bad.json");
    { std::ofstream(bad) << "{not json"; }
    auto r = run({"plot-pc", "-i", bad, "-o", tmp.file("x.svg")});
    CHECK(r.code == 1);
    CHECK(!r.err.empty());

    const auto nonpsd = tmp.file("nonpsd.json");
    {
        std::ofstream(nonpsd)
            << R"({"schema_version":"1","x":[1,2],"y":[0,0],"covariance":[[1,2],[2,1]]})";
    }
    CHECK(run({"stats", "-i", nonpsd}).code == 1);
    CHECK(run({"plot-pc", "-i", tmp.file("missing.json"), "-o", tmp.file("y.svg")}).code ==
          1);
}

TEST_CASE("help exits cleanly") {
    const auto r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("plot-pc") != std::string::npos);
}
