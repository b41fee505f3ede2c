#include "cli.hpp"

#include "render.hpp"

#include "isoperc/analysis.hpp"
#include "isoperc/error.hpp"
#include "isoperc/percsim.hpp"
#include "isoperc/rcm.hpp"
#include "isoperc/serialize.hpp"
#include "isoperc/startriangle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace isoperc::tools {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr const char* kVersion = "0.1.0";

// Bad input detected by the command layer (exit status 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 0;
    unsigned threads = 0;

    std::string kind = "square";
    double size = 0;  // 0: chosen from the experiment
    double angle = kPi / 2;
    int colour = -1;
    bool dual = false;
    std::string input;

    std::string model = "perc";
    double q = 2.0;
    double beta = 1.0;
    std::vector<double> p, y, theta;

    std::string box;
    double tilt = 0.0;
    std::string direction = "h";
    std::size_t samples = 1000;
    std::vector<double> radii, sizes, distances, betas, p_grid;

    double alpha = kPi / 4;
    double side = 16;

    std::string boundary = "free";
    std::size_t burn_in = 200, measurements = 10, spacing = 2, replicas = 16;

    std::string csv, json_out, render, manifest;
    bool tracks = false, vertices = false;
    std::string what = "tiling";
    long long center = -1;
    int bits = -1;
    std::string fit_kind = "power";
    std::vector<double> window;
};

json echo(const Options& o) {
    return {{"seed", o.seed},         {"kind", o.kind},         {"size", o.size},
            {"angle", o.angle},       {"colour", o.colour},     {"dual", o.dual},
            {"input", o.input},       {"model", o.model},       {"q", o.q},
            {"beta", o.beta},         {"p", o.p},               {"y", o.y},
            {"theta", o.theta},       {"box", o.box},           {"tilt", o.tilt},
            {"direction", o.direction}, {"samples", o.samples}, {"radii", o.radii},
            {"sizes", o.sizes},       {"distances", o.distances}, {"betas", o.betas},
            {"p-grid", o.p_grid},     {"alpha", o.alpha},       {"side", o.side},
            {"boundary", o.boundary}, {"burn-in", o.burn_in},   {"measurements", o.measurements},
            {"spacing", o.spacing},   {"replicas", o.replicas}, {"csv", o.csv},
            {"json", o.json_out},     {"render", o.render},     {"tracks", o.tracks},
            {"vertices", o.vertices}, {"what", o.what},
            {"center", o.center},     {"bits", o.bits},         {"fit-kind", o.fit_kind},
            {"window", o.window}};
}

// Flat JSON config: every key names a long option.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError("config", std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config", "config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            auto text = [](const json& v) {
                if (v.is_string()) return v.get<std::string>();
                if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
                return v.dump();
            };
            if (value.is_array())
                for (const auto& v : value) item.inputs.push_back(text(v));
            else
                item.inputs.push_back(text(value));
            items.push_back(std::move(item));
        }
        return items;
    }
};

struct Result {
    std::string command;
    json result = json::object();
    json diagnostics = json::object();
    std::string graph_hash;
    std::string weights_hash;
    std::vector<std::string> outputs;
};

void write_file(const std::string& path, const std::string& text, Result& r) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
    r.outputs.push_back(path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string curve_csv(const ObservableCurve& c) {
    std::string s = "abscissa,estimate,stderr,n_samples\n";
    for (std::size_t i = 0; i < c.abscissa.size(); ++i)
        s += fmt(c.abscissa[i]) + "," + fmt(c.estimate[i]) + "," + fmt(c.std_error[i]) + "," +
             std::to_string(c.samples[i]) + "\n";
    return s;
}

json curve_json(const ObservableCurve& c) {
    return {{"abscissa", c.abscissa}, {"estimate", c.estimate}, {"stderr", c.std_error}, {"n_samples", c.samples}};
}

json estimate_json(const Estimate& e) {
    return {{"estimate", e.value}, {"stderr", e.std_error}, {"n_samples", e.samples}};
}

json fit_json(const ExponentFit& f) {
    return {{"kind", f.kind == FitKind::Power ? "power" : "exponential"},
            {"estimate", f.estimate},
            {"ci", {f.ci_lo, f.ci_hi}},
            {"stderr", f.std_error},
            {"intercept", f.intercept},
            {"window", {f.window.lo, f.window.hi}},
            {"points", f.points},
            {"residual_norm", f.residual_norm}};
}

// ---------------------------------------------------------------------------
// Graphs

bool is_square(const Options& o) { return o.kind == "square"; }

SvgStyle style(const Options& o, bool tracks = true) {
    SvgStyle s;
    s.tracks = tracks && o.tracks;
    s.vertices = o.vertices;
    return s;
}

struct BoxDims {
    double a = 0, b = 0;
};

std::optional<BoxDims> parse_box(const Options& o) {
    if (o.box.empty()) return std::nullopt;
    const auto x = o.box.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument("x");
        BoxDims d{std::stod(o.box.substr(0, x)), std::stod(o.box.substr(x + 1))};
        if (!(d.a > 0 && d.b > 0)) throw std::invalid_argument("size");
        return d;
    } catch (const std::exception&) {
        throw UsageError("--box expects AxB with positive A and B, got '" + o.box + "'");
    }
}

// Square: a x b lattice vertices (rows x cols). Otherwise width x height.
double size_for_box(const Options& o, const BoxDims& d) {
    if (is_square(o)) return std::ceil(d.a + d.b - 2 + 2 * (kBoundaryMargin + 2));
    const double diag = std::hypot(d.a, d.b);
    return std::ceil((o.kind == "penrose" ? 1.25 : 1.0) * diag + 2 * (kBoundaryMargin + 2));
}

double default_size(const Options& o) {
    if (o.size > 0) return o.size;
    if (auto d = parse_box(o)) return size_for_box(o, *d);
    if (o.kind == "penrose") return 40;
    if (o.kind == "triangular" || o.kind == "hexagonal") return 24;
    return 32;
}

std::shared_ptr<const RhombicTiling> make_tiling(const Options& o, double size) {
    if (!o.input.empty()) return std::make_shared<RhombicTiling>(tiling_from_json(read_file(o.input)));
    const int n = static_cast<int>(std::lround(size));
    if (o.kind == "square") return std::make_shared<RhombicTiling>(periodic_tiling(PeriodicKind::Square, n));
    if (o.kind == "triangular" || o.kind == "hexagonal")
        return std::make_shared<RhombicTiling>(periodic_tiling(PeriodicKind::TriangularHexagonal, n));
    if (o.kind == "rhombus")
        return std::make_shared<RhombicTiling>(periodic_tiling(PeriodicKind::CustomAngle, n, o.angle));
    if (o.kind == "penrose") return std::make_shared<RhombicTiling>(penrose_tiling(size));
    throw UsageError("unknown tiling kind '" + o.kind + "'");
}

int colour_class(const Options& o) {
    int c = o.colour >= 0 ? o.colour : (o.kind == "hexagonal" ? 1 : 0);
    if (c > 1) throw UsageError("--colour must be 0 or 1");
    return o.dual ? 1 - c : c;
}

Vec2 window_center(const RhombicTiling& t) { return (t.window().lo + t.window().hi) * 0.5; }

OrientedBox box_at(const Options& o, Vec2 center, const BoxDims& d) {
    if (is_square(o) && o.input.empty()) return square_lattice_box(center, static_cast<int>(d.a), static_cast<int>(d.b));
    return {center, d.a, d.b, o.tilt};
}

CrossingDirection direction(const Options& o) {
    if (o.direction == "h") return CrossingDirection::Horizontal;
    if (o.direction == "v") return CrossingDirection::Vertical;
    throw UsageError("--direction must be h or v");
}

struct Setup {
    std::shared_ptr<const RhombicTiling> tiling;
    IsoradialGraph graph;
    std::optional<OrientedBox> box;
};

Setup setup_graph(const Options& o) {
    Setup s;
    s.tiling = make_tiling(o, default_size(o));
    s.graph = build_isoradial(s.tiling, colour_class(o));
    if (auto d = parse_box(o)) s.box = box_at(o, window_center(*s.tiling), *d);
    return s;
}

std::vector<double> defaulted(const std::vector<double>& v, std::vector<double> fallback) {
    return v.empty() ? fallback : v;
}

RunOptions run_options(const Options& o) { return {o.seed, o.threads, 200}; }

BoundaryCondition boundary(const Options& o) {
    if (o.boundary == "free") return BoundaryCondition::free();
    if (o.boundary == "wired") return BoundaryCondition::wired();
    throw UsageError("--boundary must be free or wired");
}

ChainOptions chain_options(const Options& o) { return {o.burn_in, o.measurements, o.spacing}; }

void finish_csv(const Options& o, const std::string& csv, Result& r) {
    if (!o.csv.empty()) write_file(o.csv, csv, r);
}

// ---------------------------------------------------------------------------
// Commands

Result cmd_tile(const Options& o) {
    Result r;
    const auto t = make_tiling(o, default_size(o));
    const auto report = validate_tiling(*t);
    r.result["rhombi"] = t->size();
    r.result["vertices"] = t->vertex_count();
    r.result["valid"] = report.ok();
    r.result["failures"] = report.failures();
    if (report.ok()) {
        r.result["tracks"] = extract_tracks(*t).size();
        r.result["bap_epsilon"] = bap_epsilon(*t);
        r.result["flippable"] = flippable_vertices(*t).size();
    }
    r.graph_hash = content_hash(*t);
    if (!o.json_out.empty()) write_file(o.json_out, tiling_to_json(*t), r);
    if (!o.render.empty()) write_file(o.render, render_tiling_svg(*t, style(o)), r);
    return r;
}

Result cmd_graph(const Options& o) {
    Result r;
    const auto s = setup_graph(o);
    const auto& g = s.graph;
    r.result["vertices"] = g.vertex_count();
    r.result["edges"] = g.edge_count();
    r.result["faces"] = g.faces.size();
    r.result["boundary"] = g.boundary.size();
    r.result["colour_class"] = g.colour_class;
    r.graph_hash = content_hash(g);
    if (!o.json_out.empty()) write_file(o.json_out, graph_to_json(g), r);
    if (!o.render.empty()) write_file(o.render, render_graph_svg(g, style(o, false)), r);
    return r;
}

EdgeWeights weights_for(const Options& o, const IsoradialGraph& g) {
    if (o.model == "perc") return percolation_weights(g, o.beta);
    if (o.model == "rc") return rc_weights(g, o.q, o.beta);
    throw UsageError("--model must be perc or rc");
}

Result cmd_weights(const Options& o) {
    Result r;
    const auto s = setup_graph(o);
    const auto w = weights_for(o, s.graph);
    r.result["edges"] = w.p.size();
    r.result["model"] = o.model;
    r.result["beta"] = w.beta;
    if (w.q) r.result["q"] = *w.q;
    if (!w.p.empty()) {
        r.result["p_min"] = *std::min_element(w.p.begin(), w.p.end());
        r.result["p_max"] = *std::max_element(w.p.begin(), w.p.end());
    }
    r.graph_hash = content_hash(s.graph);
    r.weights_hash = content_hash(w);
    if (!o.json_out.empty()) write_file(o.json_out, graph_to_json(s.graph, {w}), r);
    return r;
}

Result cmd_percolate(const Options& o, const std::string& what) {
    Result r;
    if (what == "crossing" && o.box.empty()) throw UsageError("percolate crossing needs --box");
    const auto s = setup_graph(o);
    const auto& g = s.graph;
    r.graph_hash = content_hash(g);
    const RunOptions run = run_options(o);
    if (what == "scan") {
        const auto betas = defaulted(o.betas, {0.8, 0.9, 1.0, 1.1, 1.25});
        const auto rows = near_critical_scan(g, betas, o.samples, run);
        std::string csv = "beta,theta,theta_stderr,chi_finite,chi_finite_stderr,largest_fraction,"
                          "largest_fraction_stderr,spanning,spanning_stderr,clusters_per_vertex,n_samples\n";
        json out = json::array();
        for (const auto& row : rows) {
            csv += fmt(row.beta) + "," + fmt(row.theta.value) + "," + fmt(row.theta.std_error) + "," +
                   fmt(row.chi_finite.value) + "," + fmt(row.chi_finite.std_error) + "," +
                   fmt(row.largest_fraction.value) + "," + fmt(row.largest_fraction.std_error) + "," +
                   fmt(row.spanning.value) + "," + fmt(row.spanning.std_error) + "," +
                   fmt(row.clusters_per_vertex.value) + "," + std::to_string(row.theta.samples) + "\n";
            out.push_back({{"beta", row.beta},
                           {"theta", estimate_json(row.theta)},
                           {"chi_finite", estimate_json(row.chi_finite)},
                           {"largest_fraction", estimate_json(row.largest_fraction)},
                           {"spanning", estimate_json(row.spanning)},
                           {"clusters_per_vertex", estimate_json(row.clusters_per_vertex)}});
        }
        r.result["rows"] = out;
        finish_csv(o, csv, r);
        return r;
    }
    const auto w = percolation_weights(g, o.beta);
    r.weights_hash = content_hash(w);
    if (what == "crossing") {
        const CrossingSpec spec{*s.box, direction(o)};
        const auto e = crossing_probability(g, w, spec, o.samples, run);
        r.result = estimate_json(e);
        r.result["beta"] = o.beta;
        const BoxCrossing bc(g, spec);
        r.result["box_edges"] = bc.edge_count();
        if (bc.edge_count() <= 24) r.result["exact"] = exact_crossing_probability(g, w, spec);
        ObservableCurve c;
        c.abscissa = {o.beta};
        c.estimate = {e.value};
        c.std_error = {e.std_error};
        c.samples = {e.samples};
        finish_csv(o, curve_csv(c), r);
        return r;
    }
    ObservableCurve c;
    if (what == "one-arm") c = one_arm_curve(g, w, defaulted(o.radii, {1, 2, 4, 8}), o.samples, run);
    else if (what == "volume") c = volume_tail_curve(g, w, defaulted(o.sizes, {1, 4, 16, 64}), o.samples, run);
    else if (what == "two-point") c = two_point_curve(g, w, defaulted(o.distances, {0, 2, 4, 8}), o.samples, run);
    else throw UsageError("unknown percolate command '" + what + "'");
    r.result = curve_json(c);
    finish_csv(o, curve_csv(c), r);
    return r;
}

Result cmd_spacetime(const Options& o) {
    Result r;
    const auto e = spacetime_crossing({o.alpha, o.side, {0.0, 0.0}}, o.samples, run_options(o));
    r.result = estimate_json(e);
    r.result["alpha"] = o.alpha;
    r.result["side"] = o.side;
    ObservableCurve c;
    c.abscissa = {o.alpha};
    c.estimate = {e.value};
    c.std_error = {e.std_error};
    c.samples = {e.samples};
    finish_csv(o, curve_csv(c), r);
    return r;
}

// Random-cluster graphs: with --box on the square lattice the patch is the
// box itself, boundary ring included.
Setup rc_setup(const Options& o) {
    Setup s = setup_graph(o);
    if (s.box) s.graph = restrict_to_box(s.graph, *s.box);
    return s;
}

RCParams rc_params(const Options& o, const IsoradialGraph& g) {
    if (!o.p.empty()) {
        if (o.p.size() != 1) throw UsageError("--p takes a single probability here");
        return RCParams::uniform(g.edge_count(), o.p[0], o.q);
    }
    return RCParams::from_weights(rc_weights(g, o.q, o.beta));
}

Result cmd_rc(const Options& o, const std::string& what) {
    Result r;
    const BoundaryCondition b = boundary(o);
    if (what == "scan") {
        if (o.box.empty()) throw UsageError("rc scan needs --box");
        const auto s = rc_setup(o);
        const double pc = rc_critical_p(o.q);
        std::vector<double> grid = o.p_grid;
        if (grid.empty())
            for (int i = -4; i <= 4; ++i) grid.push_back(pc + 0.01 * i);
        const auto scan = rc_crossing_scan(s.graph, o.q, grid, b, {*s.box, direction(o)}, o.replicas,
                                           chain_options(o), run_options(o));
        ObservableCurve c;
        json rows = json::array();
        for (const auto& row : scan.rows) {
            c.abscissa.push_back(row.p);
            c.estimate.push_back(row.crossing.value);
            c.std_error.push_back(row.crossing.std_error);
            c.samples.push_back(row.crossing.samples);
            rows.push_back({{"p", row.p}, {"start_gap", row.start_gap}});
        }
        r.result = curve_json(c);
        r.result["steepest_rise"] = scan.steepest_rise;
        r.result["monotone"] = scan.monotone;
        r.result["critical_p"] = pc;
        r.diagnostics = {{"sweeps_per_chain", scan.sweeps_per_chain},
                         {"max_start_gap", scan.max_start_gap},
                         {"rows", rows}};
        r.graph_hash = content_hash(s.graph);
        finish_csv(o, curve_csv(c), r);
        return r;
    }
    if (what == "decay") {
        const auto s = setup_graph(o);
        const auto d = rc_two_point_decay(s.graph, o.q, o.beta, defaulted(o.distances, {0, 1, 2, 3, 4, 5, 6, 8}),
                                          o.replicas, chain_options(o), run_options(o));
        r.result = curve_json(d.curve);
        r.result["exponential"] = fit_json(d.exponential);
        r.result["power"] = fit_json(d.power);
        r.result["exponential_preferred"] = d.exponential_preferred;
        r.graph_hash = content_hash(s.graph);
        finish_csv(o, curve_csv(d.curve), r);
        return r;
    }
    const auto s = rc_setup(o);
    const auto& g = s.graph;
    const auto params = rc_params(o, g);
    r.graph_hash = content_hash(g);
    if (what == "exact") {
        const auto dist = exact_rc_distribution(g, params, b);
        std::vector<double> marginal(g.edge_count(), 0.0);
        std::string csv = "index,probability\n";
        for (std::uint64_t i = 0; i < dist.size(); ++i) {
            for (std::size_t e = 0; e < marginal.size(); ++e)
                if ((i >> e) & 1U) marginal[e] += dist[i];
            csv += std::to_string(i) + "," + fmt(dist[i]) + "\n";
        }
        r.result["edges"] = g.edge_count();
        r.result["states"] = dist.size();
        r.result["edge_open_probability"] = marginal;
        finish_csv(o, csv, r);
        return r;
    }
    if (what == "sample") {
        Rng rng(o.seed);
        const auto c = rc_heat_bath_sample(g, params, b, o.burn_in, rng);
        r.result["edges"] = g.edge_count();
        r.result["open"] = c.open_count();
        r.result["clusters"] = cluster_decomposition(g, c.open).count();
        r.result["boundary_clusters"] = boundary_cluster_count(g, c.open, b);
        r.result["sweeps"] = o.burn_in;
        r.weights_hash = c.weights_id;
        if (!o.render.empty()) write_file(o.render, render_configuration_svg(g, c.open), r);
        return r;
    }
    throw UsageError("unknown rc command '" + what + "'");
}

std::array<double, 3> triple(const std::vector<double>& v, const char* name) {
    if (v.size() != 3) throw UsageError(std::string("--") + name + " takes three comma-separated values");
    return {v[0], v[1], v[2]};
}

TriangleParams triangle_params(const Options& o) {
    if (o.model == "perc") {
        if (!o.theta.empty()) return TriangleParams::canonical_percolation(triple(o.theta, "theta"));
        const auto p = triple(o.p, "p");
        return TriangleParams::percolation(p[0], p[1], p[2]);
    }
    if (o.model == "rc") {
        if (!o.theta.empty()) return TriangleParams::canonical_random_cluster(triple(o.theta, "theta"), o.q);
        const auto y = triple(o.y, "y");
        return TriangleParams::random_cluster(y[0], y[1], y[2], o.q);
    }
    throw UsageError("--model must be perc or rc");
}

Result cmd_star_triangle(const Options& o, const std::string& what) {
    Result r;
    if (what == "verify") {
        const auto rep = verify_equivalence(triangle_params(o));
        r.result = {{"residual", rep.residual},
                    {"law_triangle", rep.law_triangle},
                    {"law_star", rep.law_star},
                    {"max_abs_diff", rep.max_abs_diff},
                    {"pass", rep.pass},
                    {"consistent", rep.consistent}};
        return r;
    }
    if (what == "couple") {
        const auto params = triangle_params(o);
        for (auto dir : {Direction::TriangleToStar, Direction::StarToTriangle}) {
            const CouplingKernel k(params, dir);
            json rows = json::array();
            for (unsigned from = 0; from < 8; ++from) {
                json row = json::array();
                for (unsigned to = 0; to < 8; ++to) row.push_back(k.probability(from, to));
                rows.push_back(row);
            }
            const char* key = dir == Direction::TriangleToStar ? "triangle_to_star" : "star_to_triangle";
            r.result[key] = {{"kernel", rows}, {"pushforward_residual", k.pushforward_residual()}};
            if (o.bits >= 0) {
                if (o.bits > 7) throw UsageError("--bits must lie in 0..7");
                Rng rng(o.seed);
                r.result[key]["sample"] = k.sample(static_cast<unsigned>(o.bits), rng);
            }
        }
        return r;
    }
    if (what == "flip") {
        const auto s = setup_graph(o);
        const auto& t = *s.tiling;
        VertexId center = 0;
        if (o.center >= 0) {
            center = static_cast<VertexId>(o.center);
        } else {
            const auto f = flippable_vertices(t);
            if (f.empty()) throw Error(ErrorKind::NotFlippable, "tiling has no flippable vertex");
            // the flippable vertex nearest the window centre
            const Vec2 c = window_center(t);
            center = *std::min_element(f.begin(), f.end(), [&](VertexId a, VertexId b) {
                return norm(t.vertices()[a] - c) < norm(t.vertices()[b] - c);
            });
        }
        const auto w = percolation_weights(s.graph, 1.0);
        Rng rng(o.seed);
        std::vector<std::uint8_t> open;
        sample_open(w, rng, open);
        const auto sw = apply_switch(s.graph, w, open, center, rng);
        const auto& flipped = *sw.graph.tiling;
        r.result["center"] = center;
        r.result["direction"] = sw.direction == Direction::TriangleToStar ? "triangle_to_star" : "star_to_triangle";
        r.result["valid"] = validate_tiling(flipped).ok();
        r.result["open_before"] = std::count(open.begin(), open.end(), 1);
        r.result["open_after"] = std::count(sw.open.begin(), sw.open.end(), 1);
        r.graph_hash = content_hash(flipped);
        if (!o.json_out.empty()) write_file(o.json_out, tiling_to_json(flipped), r);
        if (!o.render.empty()) write_file(o.render, render_tiling_svg(flipped, style(o)), r);
        return r;
    }
    throw UsageError("unknown star-triangle command '" + what + "'");
}

ObservableCurve read_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("empty CSV input");
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) header.push_back(cell);
    }
    auto column = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int cx = column("abscissa"), cy = column("estimate"), cs = column("stderr"), cn = column("n_samples");
    if (cx < 0 || cy < 0) throw UsageError("CSV needs abscissa and estimate columns");
    ObservableCurve c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        try {
            c.abscissa.push_back(std::stod(cells.at(cx)));
            c.estimate.push_back(std::stod(cells.at(cy)));
            c.std_error.push_back(cs >= 0 ? std::stod(cells.at(cs)) : 0.0);
            c.samples.push_back(cn >= 0 ? std::stoull(cells.at(cn)) : 0);
        } catch (const std::exception&) {
            throw UsageError("malformed CSV row: " + line);
        }
    }
    return c;
}

Result cmd_fit(const Options& o) {
    Result r;
    if (o.input.empty()) throw UsageError("fit needs --input CSV");
    const auto c = read_curve_csv(read_file(o.input));
    FitWindow window;
    if (!o.window.empty()) {
        if (o.window.size() != 2) throw UsageError("--window takes lo,hi");
        window = {o.window[0], o.window[1]};
    }
    const FitOptions fo{1000, o.seed, 0.95};
    ExponentFit f;
    if (o.fit_kind == "power") f = fit_power_law(c, window, fo);
    else if (o.fit_kind == "exponential") f = fit_exponential(c, window, fo);
    else throw UsageError("--fit-kind must be power or exponential");
    r.result = fit_json(f);
    r.graph_hash = content_hash(read_file(o.input));
    return r;
}

Result cmd_render(const Options& o) {
    Result r;
    std::string svg;
    if (o.what == "tiling") {
        const auto t = make_tiling(o, default_size(o));
        svg = render_tiling_svg(*t, style(o));
        r.graph_hash = content_hash(*t);
        r.result["rhombi"] = t->size();
        if (o.tracks) r.result["tracks"] = extract_tracks(*t).size();
    } else if (o.what == "graph" || o.what == "configuration") {
        const auto s = setup_graph(o);
        r.graph_hash = content_hash(s.graph);
        if (o.what == "graph") {
            svg = render_graph_svg(s.graph, style(o, false));
        } else {
            const auto w = percolation_weights(s.graph, o.beta);
            Rng rng(o.seed);
            std::vector<std::uint8_t> open;
            sample_open(w, rng, open);
            svg = render_configuration_svg(s.graph, open, style(o, false));
            r.weights_hash = content_hash(w);
            r.result["open"] = std::count(open.begin(), open.end(), 1);
            r.result["clusters"] = cluster_decomposition(s.graph, open).count();
        }
    } else {
        throw UsageError("--what must be tiling, graph or configuration");
    }
    if (o.render.empty()) throw UsageError("render needs --render PATH");
    write_file(o.render, svg, r);
    return r;
}

int status_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::UnsupportedParameter:
    case ErrorKind::Validation:
    case ErrorKind::Shape:
    case ErrorKind::Format:
    case ErrorKind::InvalidAngle:
    case ErrorKind::InvalidDirections:
    case ErrorKind::EmptyWindow:
    case ErrorKind::WrongModel:
    case ErrorKind::OutOfRegime:
        return 2;
    default:
        return 3;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Percolation and random-cluster experiments on isoradial graphs", "isoperc"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file of option values; command-line flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    app.add_option("--seed", o.seed, "Random seed")->envname("ISOPERC_SEED");
    app.add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app.add_option("--kind,--graph", o.kind, "Tiling: square, triangular, hexagonal, rhombus, penrose")
        ->check(CLI::IsMember({"square", "triangular", "hexagonal", "rhombus", "penrose"}));
    app.add_option("--size", o.size, "Tiling window size");
    app.add_option("--angle", o.angle, "Rhombus angle for --kind rhombus");
    app.add_option("--colour", o.colour, "Colour class of the graph (0 or 1)");
    app.add_flag("--dual", o.dual, "Use the other colour class");
    app.add_option("--input", o.input, "Tiling JSON (or CSV for fit)");
    app.add_option("--model", o.model, "perc or rc")->check(CLI::IsMember({"perc", "rc"}));
    app.add_option("--q", o.q, "Cluster weight");
    app.add_option("--beta", o.beta, "Tilt of the canonical weights");
    app.add_option("--p", o.p, "Edge probabilities")->delimiter(',');
    app.add_option("--y", o.y, "Edge ratios")->delimiter(',');
    app.add_option("--theta", o.theta, "Rhombus angles")->delimiter(',');
    app.add_option("--box", o.box, "AxB: lattice rows x cols on square graphs, width x height otherwise");
    app.add_option("--tilt", o.tilt, "Box tilt (non-square graphs)");
    app.add_option("--direction", o.direction, "Crossing direction h or v");
    app.add_option("--samples", o.samples, "Monte Carlo samples");
    app.add_option("--radii", o.radii, "One-arm radii")->delimiter(',');
    app.add_option("--sizes", o.sizes, "Volume thresholds")->delimiter(',');
    app.add_option("--distances", o.distances, "Two-point distances")->delimiter(',');
    app.add_option("--betas", o.betas, "Beta grid for scans")->delimiter(',');
    app.add_option("--p-grid", o.p_grid, "p grid for random-cluster scans")->delimiter(',');
    app.add_option("--alpha", o.alpha, "Space-time box tilt");
    app.add_option("--side", o.side, "Space-time box side");
    app.add_option("--boundary", o.boundary, "free or wired");
    app.add_option("--burn-in", o.burn_in, "Heat-bath sweeps before measuring");
    app.add_option("--measurements", o.measurements, "Measurements per chain");
    app.add_option("--spacing", o.spacing, "Sweeps between measurements");
    app.add_option("--replicas", o.replicas, "Independent chains");
    app.add_option("--csv", o.csv, "Write results as CSV");
    app.add_option("--json", o.json_out, "Write a JSON document");
    app.add_option("--render", o.render, "Write an SVG rendering");
    app.add_option("--manifest", o.manifest, "Write the run manifest");
    app.add_flag("--tracks", o.tracks, "Draw tracks");
    app.add_flag("--vertices", o.vertices, "Draw vertices");
    app.add_option("--what", o.what, "render: tiling, graph or configuration");
    app.add_option("--center", o.center, "Tiling vertex to flip");
    app.add_option("--bits", o.bits, "Configuration to push through the coupling");
    app.add_option("--fit-kind", o.fit_kind, "power or exponential");
    app.add_option("--window", o.window, "Fit window lo,hi")->delimiter(',');

    auto leaf = [](CLI::App* parent, const std::string& name, const std::string& help) {
        auto* c = parent->add_subcommand(name, help);
        c->fallthrough();
        return c;
    };
    leaf(&app, "tile", "Generate and validate a rhombic tiling");
    leaf(&app, "graph", "Build the isoradial graph of a tiling");
    leaf(&app, "weights", "Canonical edge weights");
    auto* percolate = leaf(&app, "percolate", "Bond percolation experiments");
    percolate->require_subcommand(1);
    for (const char* s : {"crossing", "one-arm", "volume", "two-point", "scan"}) leaf(percolate, s, s);
    leaf(&app, "spacetime", "Space-time percolation crossing");
    auto* rc = leaf(&app, "rc", "Random-cluster model");
    rc->require_subcommand(1);
    for (const char* s : {"exact", "sample", "scan", "decay"}) leaf(rc, s, s);
    auto* st = leaf(&app, "star-triangle", "Star-triangle transformation");
    st->require_subcommand(1);
    for (const char* s : {"verify", "couple", "flip"}) leaf(st, s, s);
    leaf(&app, "fit", "Fit a power law or exponential to a CSV curve");
    leaf(&app, "render", "Render a tiling, graph or configuration as SVG");

    std::vector<std::string> storage{"isoperc"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Result r;
    try {
        const auto* cmd = app.get_subcommands().front();
        const std::string top = cmd->get_name();
        const auto subs = cmd->get_subcommands();
        const std::string sub = subs.empty() ? "" : subs.front()->get_name();
        if (top == "tile") r = cmd_tile(o);
        else if (top == "graph") r = cmd_graph(o);
        else if (top == "weights") r = cmd_weights(o);
        else if (top == "percolate") r = cmd_percolate(o, sub);
        else if (top == "spacetime") r = cmd_spacetime(o);
        else if (top == "rc") r = cmd_rc(o, sub);
        else if (top == "star-triangle") r = cmd_star_triangle(o, sub);
        else if (top == "fit") r = cmd_fit(o);
        else if (top == "render") r = cmd_render(o);
        r.command = sub.empty() ? top : top + " " + sub;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return status_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }

    json manifest = {{"tool", "isoperc"},
                     {"version", kVersion},
                     {"format_version", kFormatVersion},
                     {"command", r.command},
                     {"config", echo(o)},
                     {"seed", o.seed},
                     {"threads", o.threads},
                     {"graph_hash", r.graph_hash},
                     {"weights_hash", r.weights_hash},
                     {"outputs", r.outputs},
                     {"diagnostics", r.diagnostics}};
    manifest["content_id"] = content_hash(r.command + "\n" + echo(o).dump() + "\n" + r.result.dump());
    json doc = r.result;
    doc["manifest"] = manifest;
    try {
        if (!o.manifest.empty()) {
            std::ofstream f(o.manifest, std::ios::binary);
            f << manifest.dump(2) << "\n";
            if (!f) throw std::runtime_error("failed writing " + o.manifest);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    out << doc.dump(2) << "\n";
    return 0;
}

} // namespace isoperc::tools
