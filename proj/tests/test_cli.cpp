#include "doctest.h"

#include "cli.hpp"

#include "isoperc/serialize.hpp"
#include "isoperc/tiling.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

using namespace isoperc;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Run {
    int status = 0;
    std::string out, err;
    json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.status = tools::run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "isoperc_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<std::vector<Vec2>> polygons(const std::string& svg) {
    std::vector<std::vector<Vec2>> out;
    const std::regex poly("<polygon class=\"rhombus\" points=\"([^\"]*)\"");
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), poly); it != std::sregex_iterator(); ++it) {
        std::vector<Vec2> pts;
        std::istringstream s((*it)[1].str());
        std::string pair;
        while (s >> pair) {
            const auto comma = pair.find(',');
            pts.push_back({std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))});
        }
        out.push_back(pts);
    }
    return out;
}

} // namespace

TEST_CASE("exit codes") {
    CHECK(run({}).status == 2);
    CHECK(run({"bogus"}).status == 2);
    CHECK(run({"tile", "--kind", "hexagon"}).status == 2);
    CHECK(run({"percolate"}).status == 2);
    CHECK(run({"star-triangle", "verify", "--model", "rc", "--q", "2", "--y", "1,1"}).status == 2);
    CHECK(run({"rc", "exact", "--q", "0.5", "--box", "2x2", "--p", "0.5"}).status == 2);
    // a box larger than the patch fails at run time
    CHECK(run({"percolate", "crossing", "--box", "30x30", "--size", "20", "--samples", "10"}).status == 3);
    CHECK(run({"--help"}).status == 0);
}

TEST_CASE("penrose tiles render with angles in multiples of pi/5") {
    const auto svg_path = scratch("penrose.svg");
    const auto r = run({"tile", "--kind", "penrose", "--size", "32", "--render", svg_path.string()});
    REQUIRE(r.status == 0);
    const auto svg = slurp(svg_path);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    const auto polys = polygons(svg);
    CHECK(polys.size() == r.doc()["rhombi"].get<std::size_t>());
    for (const auto& p : polys) {
        REQUIRE(p.size() == 4);
        const Vec2 a = p[1] - p[0], b = p[3] - p[0];
        const double angle = std::acos(dot(a, b) / (norm(a) * norm(b)));
        const double j = angle / (std::numbers::pi / 5);
        CHECK(std::abs(j - std::round(j)) <= 1e-3);
    }
    CHECK(r.doc()["manifest"]["outputs"][0] == svg_path.string());
}

TEST_CASE("track rendering and golden output") {
    const auto path = scratch("tracks.svg");
    const auto r = run({"render", "--kind", "penrose", "--size", "16", "--tracks", "--render", path.string()});
    REQUIRE(r.status == 0);
    const auto svg = slurp(path);
    CHECK(count(svg, "<polyline class=\"track\"") == extract_tracks(penrose_tiling(16)).size());
    CHECK(count(svg, "<polyline class=\"track\"") == r.doc()["tracks"].get<std::size_t>());

    const auto golden = scratch("golden.svg");
    REQUIRE(run({"render", "--kind", "square", "--size", "3", "--render", golden.string()}).status == 0);
    CHECK(slurp(golden) == slurp(fs::path(ISOPERC_TEST_DATA) / "square3.svg"));
}

TEST_CASE("configuration rendering") {
    const auto path = scratch("config.svg");
    const auto r = run({"render", "--what", "configuration", "--kind", "triangular", "--size", "10", "--seed", "4",
                        "--render", path.string()});
    REQUIRE(r.status == 0);
    const auto svg = slurp(path);
    CHECK(count(svg, "class=\"edge open\"") == r.doc()["open"].get<std::size_t>());
    CHECK(count(svg, "class=\"edge open\"") + count(svg, "class=\"edge closed\"") > 0);
}

TEST_CASE("star-triangle reports") {
    const auto r = run({"star-triangle", "verify", "--model", "rc", "--q", "4", "--y", "1,1,1"});
    REQUIRE(r.status == 0);
    const auto d = r.doc();
    CHECK(d["pass"] == true);
    CHECK(d["max_abs_diff"].get<double>() <= 1e-12);
    CHECK(d["law_triangle"][0].get<double>() == doctest::Approx(0.5));

    const auto c = run({"star-triangle", "couple", "--model", "perc", "--theta", "2.0,2.0,2.2831853071795862"});
    REQUIRE(c.status == 0);
    CHECK(c.doc()["triangle_to_star"]["pushforward_residual"].get<double>() <= 1e-12);

    const auto f = run({"star-triangle", "flip", "--kind", "triangular", "--size", "4"});
    REQUIRE(f.status == 0);
    CHECK(f.doc()["valid"] == true);
}

TEST_CASE("crossing of the 64 x 65 box") {
    const auto r = run({"percolate", "crossing", "--graph", "square", "--beta", "1.0", "--box", "64x65", "--samples",
                        "20000", "--seed", "1"});
    REQUIRE(r.status == 0);
    CHECK(std::abs(r.doc()["estimate"].get<double>() - 0.5) <= 0.02);
}

TEST_CASE("reproducible runs, manifests, config files and the seed variable") {
    const auto csv = scratch("arm.csv");
    const auto manifest = scratch("arm.json");
    const std::vector<std::string> args{"percolate", "one-arm", "--kind", "square", "--size", "24", "--radii",
                                        "1,2,3,4,5", "--samples", "200", "--seed", "9", "--csv", csv.string(),
                                        "--manifest", manifest.string()};
    const auto a = run(args);
    REQUIRE(a.status == 0);
    const auto first_csv = slurp(csv);
    const auto b = run(args);
    CHECK(a.out == b.out);
    CHECK(first_csv == slurp(csv));
    const auto m = json::parse(slurp(manifest));
    CHECK(m["seed"] == 9);
    CHECK(m["graph_hash"].get<std::string>().size() == 16);
    CHECK(m["weights_hash"].get<std::string>().size() == 16);
    CHECK(m["content_id"] == a.doc()["manifest"]["content_id"]);
    CHECK(first_csv.rfind("abscissa,estimate,stderr,n_samples\n", 0) == 0);

    auto threads = args;
    threads.insert(threads.end(), {"--threads", "3"});
    CHECK(run(threads).doc()["estimate"] == a.doc()["estimate"]);

    const auto fit = run({"fit", "--input", csv.string(), "--fit-kind", "power"});
    REQUIRE(fit.status == 0);
    CHECK(fit.doc()["estimate"].get<double>() < 0);

    const auto config = scratch("config.json");
    std::ofstream(config) << R"({"kind": "square", "size": 24, "samples": 50, "seed": 3, "radii": [1, 2]})";
    const auto c1 = run({"percolate", "one-arm", "--config", config.string()});
    REQUIRE(c1.status == 0);
    CHECK(c1.doc()["manifest"]["config"]["samples"] == 50);
    CHECK(c1.doc()["n_samples"][0] == 50);
    const auto c2 = run({"percolate", "one-arm", "--config", config.string(), "--samples", "60"});
    CHECK(c2.doc()["n_samples"][0] == 60);
    std::ofstream(scratch("bad.json")) << R"({"no-such-option": 1})";
    CHECK(run({"tile", "--config", scratch("bad.json").string()}).status == 2);

    ::setenv("ISOPERC_SEED", "77", 1);
    CHECK(run({"spacetime", "--side", "4", "--samples", "10"}).doc()["manifest"]["seed"] == 77);
    CHECK(run({"spacetime", "--side", "4", "--samples", "10", "--seed", "5"}).doc()["manifest"]["seed"] == 5);
    ::unsetenv("ISOPERC_SEED");
}

TEST_CASE("random-cluster commands") {
    const auto exact = run({"rc", "exact", "--box", "2x2", "--p", "0.6", "--q", "2", "--boundary", "free"});
    REQUIRE(exact.status == 0);
    CHECK(exact.doc()["edges"] == 4);
    CHECK(exact.doc()["states"] == 16);
    const auto sample = run({"rc", "sample", "--kind", "square", "--size", "12", "--q", "2", "--burn-in", "20"});
    REQUIRE(sample.status == 0);
    CHECK(sample.doc()["clusters"].get<int>() >= 1);
    CHECK(run({"rc", "decay", "--q", "4", "--beta", "1.2"}).status == 2);
}
