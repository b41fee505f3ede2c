#include "isoperc/serialize.hpp"

#include "isoperc/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <limits>

namespace isoperc {

using nlohmann::json;

void ContentHasher::bytes(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h_ ^= p[i];
        h_ *= 0x100000001b3ULL;
    }
}

std::string ContentHasher::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
}

std::string content_hash(const RhombicTiling& tiling) {
    ContentHasher h;
    h.text("tiling");
    for (const auto& r : tiling.rhombi()) {
        h.value(r.base.x);
        h.value(r.base.y);
        h.value(r.dir_a.x);
        h.value(r.dir_a.y);
        h.value(r.dir_b.x);
        h.value(r.dir_b.y);
    }
    return h.hex();
}

std::string content_hash(const IsoradialGraph& g) {
    ContentHasher h;
    h.text("graph");
    for (Vec2 p : g.positions) {
        h.value(p.x);
        h.value(p.y);
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        h.value(g.edges[e].u);
        h.value(g.edges[e].v);
        h.value(g.theta[e]);
    }
    for (VertexId v : g.boundary) h.value(v);
    return h.hex();
}

std::string content_hash(const EdgeWeights& w) {
    ContentHasher h;
    h.text("weights");
    h.value(static_cast<int>(w.model));
    h.value(w.q.value_or(0.0));
    h.value(w.beta);
    for (double p : w.p) h.value(p);
    return h.hex();
}

std::string content_hash(std::string_view text) {
    ContentHasher h;
    h.text(text);
    return h.hex();
}

namespace {

void check_header(const json& j, std::string_view format) {
    if (!j.is_object() || j.value("format", "") != format)
        throw Error(ErrorKind::Format, "not a " + std::string(format) + " document");
    if (j.value("version", 0) != kFormatVersion)
        throw Error(ErrorKind::Format, "unsupported " + std::string(format) + " version");
}

json parse(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, e.what());
    }
}

json weights_to_json(const EdgeWeights& w) {
    json j{{"model", w.model == Model::Percolation ? "percolation" : "random-cluster"}, {"beta", w.beta}, {"p", w.p}};
    if (w.q) j["q"] = *w.q;
    return j;
}

EdgeWeights weights_from_json(const json& j) {
    EdgeWeights w;
    const std::string model = j.at("model");
    if (model == "percolation") w.model = Model::Percolation;
    else if (model == "random-cluster") w.model = Model::RandomCluster;
    else throw Error(ErrorKind::Format, "unknown model " + model);
    w.beta = j.at("beta");
    if (j.contains("q")) w.q = j.at("q").get<double>();
    w.p = j.at("p").get<std::vector<double>>();
    for (double p : w.p) w.y.push_back(p < 1 ? p / (1 - p) : std::numeric_limits<double>::infinity());
    return w;
}

} // namespace

std::string tiling_to_json(const RhombicTiling& tiling) {
    json j;
    j["format"] = "isoperc.tiling";
    j["version"] = kFormatVersion;
    json verts = json::array();
    for (Vec2 p : tiling.vertices()) verts.push_back({p.x, p.y});
    j["vertices"] = std::move(verts);
    json rhombi = json::array();
    for (RhombusId r = 0; r < tiling.size(); ++r) {
        const auto& cs = tiling.corners(r);
        json item{{"vertices", {cs[0], cs[1], cs[2], cs[3]}}};
        if (const auto& tag = tiling.rhombus(r).grid_tag)
            item["grid_tag"] = {tag->family_a, tag->line_a, tag->family_b, tag->line_b};
        rhombi.push_back(std::move(item));
    }
    j["rhombi"] = std::move(rhombi);
    return j.dump();
}

RhombicTiling tiling_from_json(std::string_view text) {
    const json j = parse(text);
    check_header(j, "isoperc.tiling");
    try {
        std::vector<Vec2> verts;
        for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        std::vector<Rhombus> rhombi;
        for (const auto& item : j.at("rhombi")) {
            const auto ids = item.at("vertices").get<std::vector<std::size_t>>();
            if (ids.size() != 4) throw Error(ErrorKind::Format, "rhombus needs four vertices");
            for (auto id : ids)
                if (id >= verts.size()) throw Error(ErrorKind::Format, "rhombus vertex out of range");
            Rhombus r{verts[ids[0]], verts[ids[1]] - verts[ids[0]], verts[ids[3]] - verts[ids[0]], std::nullopt};
            if (item.contains("grid_tag")) {
                const auto& t = item.at("grid_tag");
                r.grid_tag = GridTag{t.at(0).get<int>(), t.at(1).get<std::int64_t>(), t.at(2).get<int>(),
                                     t.at(3).get<std::int64_t>()};
            }
            rhombi.push_back(r);
        }
        return RhombicTiling::from_rhombi(std::move(rhombi));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, e.what());
    }
}

std::string graph_to_json(const IsoradialGraph& g, const std::vector<EdgeWeights>& weights) {
    json j;
    j["format"] = "isoperc.graph";
    j["version"] = kFormatVersion;
    j["colour_class"] = g.colour_class;
    json verts = json::array();
    for (Vec2 p : g.positions) verts.push_back({p.x, p.y});
    j["vertices"] = std::move(verts);
    json edges = json::array();
    for (std::size_t e = 0; e < g.edge_count(); ++e) edges.push_back({g.edges[e].u, g.edges[e].v, g.theta[e]});
    j["edges"] = std::move(edges);
    json faces = json::array();
    for (const Face& f : g.faces)
        faces.push_back({{"vertices", f.vertices}, {"center", {f.circumcenter.x, f.circumcenter.y}}});
    j["faces"] = std::move(faces);
    j["boundary"] = g.boundary;
    json tables = json::array();
    for (const auto& w : weights) tables.push_back(weights_to_json(w));
    j["weights"] = std::move(tables);
    return j.dump();
}

IsoradialGraph graph_from_json(std::string_view text, std::vector<EdgeWeights>* weights) {
    const json j = parse(text);
    check_header(j, "isoperc.graph");
    try {
        std::vector<Vec2> verts;
        for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        std::vector<Edge> edges;
        std::vector<double> theta;
        for (const auto& e : j.at("edges")) {
            edges.push_back({e.at(0).get<VertexId>(), e.at(1).get<VertexId>()});
            theta.push_back(e.at(2).get<double>());
        }
        IsoradialGraph g = make_graph(std::move(verts), std::move(edges), std::move(theta),
                                      j.at("boundary").get<std::vector<VertexId>>());
        g.colour_class = j.value("colour_class", 0);
        for (const auto& f : j.at("faces"))
            g.faces.push_back({f.at("vertices").get<std::vector<VertexId>>(),
                               {f.at("center").at(0).get<double>(), f.at("center").at(1).get<double>()}});
        if (weights && j.contains("weights"))
            for (const auto& w : j.at("weights")) weights->push_back(weights_from_json(w));
        return g;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Format, e.what());
    }
}

} // namespace isoperc
