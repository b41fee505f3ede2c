#include "isoperc/isoradial.hpp"

#include "isoperc/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace isoperc {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

// ---------------------------------------------------------------------------
// PatchMask

PatchMask::PatchMask(const RhombicTiling& tiling, double cell) : cell_(cell) {
    if (tiling.empty()) throw Error(ErrorKind::EmptyWindow, "cannot mask an empty tiling");
    const Window w = tiling.window();
    origin_ = w.lo - Vec2{2 * cell, 2 * cell};
    nx_ = static_cast<int>(std::ceil((w.hi.x - w.lo.x) / cell)) + 5;
    ny_ = static_cast<int>(std::ceil((w.hi.y - w.lo.y) / cell)) + 5;
    constexpr std::int32_t unknown = std::numeric_limits<std::int32_t>::max();
    distance_.assign(static_cast<std::size_t>(nx_) * ny_, unknown);
    auto at = [this](int i, int j) -> std::int32_t& { return distance_[static_cast<std::size_t>(j) * nx_ + i]; };

    std::deque<std::pair<int, int>> queue;
    const auto& verts = tiling.vertices();
    for (RhombusId r = 0; r < tiling.size(); ++r) {
        const auto& cs = tiling.corners(r);
        for (int s = 0; s < 4; ++s) {
            const VertexId u = cs[s], v = cs[(s + 1) % 4];
            if (tiling.side_multiplicity(u, v) != 1) continue;
            const Vec2 a = verts[u], b = verts[v];
            const int steps = static_cast<int>(std::ceil(norm(b - a) / (cell / 4))) + 1;
            for (int k = 0; k <= steps; ++k) {
                const Vec2 p = a + (b - a) * (static_cast<double>(k) / steps);
                const int i = static_cast<int>(std::floor((p.x - origin_.x) / cell));
                const int j = static_cast<int>(std::floor((p.y - origin_.y) / cell));
                if (at(i, j) != 0) {
                    at(i, j) = 0;
                    queue.emplace_back(i, j);
                }
            }
        }
    }

    // outside: 4-connected flood from the frame
    std::vector<std::pair<int, int>> stack{{0, 0}};
    at(0, 0) = -1;
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int a = i + di[k], b = j + dj[k];
            if (a < 0 || b < 0 || a >= nx_ || b >= ny_ || at(a, b) != unknown) continue;
            at(a, b) = -1;
            stack.emplace_back(a, b);
        }
    }

    // Chebyshev distance (in cells) to the boundary raster over inside cells
    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        const std::int32_t d = at(i, j);
        for (int a = i - 1; a <= i + 1; ++a) {
            for (int b = j - 1; b <= j + 1; ++b) {
                if (a < 0 || b < 0 || a >= nx_ || b >= ny_ || at(a, b) != unknown) continue;
                at(a, b) = d + 1;
                queue.emplace_back(a, b);
            }
        }
    }
}

double PatchMask::clearance(Vec2 p) const {
    const int i = static_cast<int>(std::floor((p.x - origin_.x) / cell_));
    const int j = static_cast<int>(std::floor((p.y - origin_.y) / cell_));
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -cell_;
    const std::int32_t d = distance_[static_cast<std::size_t>(j) * nx_ + i];
    if (d < 0) return -cell_;
    return std::max(0.0, (d - 1) * cell_);
}

bool PatchMask::contains_box(const OrientedBox& box, double margin) const {
    if (clearance(box.center) < margin) return false;
    const auto cs = box.corners();
    for (int s = 0; s < 4; ++s) {
        const Vec2 a = cs[s], b = cs[(s + 1) % 4];
        const int steps = static_cast<int>(std::ceil(norm(b - a) / (cell_ / 2))) + 1;
        for (int k = 0; k <= steps; ++k)
            if (clearance(a + (b - a) * (static_cast<double>(k) / steps)) < margin) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Graphs

double IsoradialGraph::clearance(Vec2 p) const {
    return mask ? mask->clearance(p) : std::numeric_limits<double>::infinity();
}

void IsoradialGraph::finalize() {
    const std::size_t n = positions.size();
    if (theta.empty()) theta.assign(edges.size(), kPi / 2);
    if (theta.size() != edges.size()) throw Error(ErrorKind::Shape, "one angle per edge required");
    adj_offset_.assign(n + 1, 0);
    for (const Edge& e : edges) {
        if (e.u >= n || e.v >= n) throw Error(ErrorKind::Shape, "edge endpoint out of range");
        ++adj_offset_[e.u + 1];
        ++adj_offset_[e.v + 1];
    }
    for (std::size_t v = 0; v < n; ++v) adj_offset_[v + 1] += adj_offset_[v];
    adj_vertex_.resize(adj_offset_[n]);
    adj_edge_.resize(adj_offset_[n]);
    std::vector<std::uint32_t> fill(adj_offset_.begin(), adj_offset_.end() - 1);
    for (EdgeId e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        adj_vertex_[fill[u]] = v;
        adj_edge_[fill[u]++] = e;
        adj_vertex_[fill[v]] = u;
        adj_edge_[fill[v]++] = e;
    }
    boundary_flag_.assign(n, 0);
    for (VertexId v : boundary) {
        if (v >= n) throw Error(ErrorKind::Shape, "boundary vertex out of range");
        boundary_flag_[v] = 1;
    }
}

IsoradialGraph make_graph(std::vector<Vec2> positions, std::vector<Edge> edges, std::vector<double> theta,
                          std::vector<VertexId> boundary) {
    IsoradialGraph g;
    g.positions = std::move(positions);
    g.edges = std::move(edges);
    g.theta = std::move(theta);
    g.boundary = std::move(boundary);
    g.finalize();
    return g;
}

namespace {

IsoradialGraph build_unchecked(std::shared_ptr<const RhombicTiling> tiling, int c) {
    const RhombicTiling& t = *tiling;
    IsoradialGraph g;
    g.colour_class = c;
    std::vector<VertexId> graph_id(t.vertex_count(), kNoId);
    for (VertexId v = 0; v < t.vertex_count(); ++v) {
        if (t.colour(v) != c) continue;
        graph_id[v] = static_cast<VertexId>(g.positions.size());
        g.positions.push_back(t.vertices()[v]);
        g.tiling_vertex.push_back(v);
        if (!t.is_interior(v)) g.boundary.push_back(graph_id[v]);
    }
    g.edges.reserve(t.size());
    g.theta.reserve(t.size());
    for (RhombusId r = 0; r < t.size(); ++r) {
        const auto& cs = t.corners(r);
        const double angle = t.rhombus(r).angle();
        if (t.colour(cs[0]) == c) {
            g.edges.push_back({graph_id[cs[0]], graph_id[cs[2]]});
            g.theta.push_back(kPi - angle);
        } else {
            g.edges.push_back({graph_id[cs[1]], graph_id[cs[3]]});
            g.theta.push_back(angle);
        }
        g.edge_rhombus.push_back(r);
    }
    for (VertexId w = 0; w < t.vertex_count(); ++w) {
        if (t.colour(w) == c || !t.is_interior(w)) continue;
        Face f;
        f.circumcenter = t.vertices()[w];
        for (RhombusId r : t.incident(w)) {
            const auto& cs = t.corners(r);
            const auto k = std::find(cs.begin(), cs.end(), w) - cs.begin();
            for (VertexId x : {cs[(k + 1) % 4], cs[(k + 3) % 4]})
                if (std::find(f.vertices.begin(), f.vertices.end(), graph_id[x]) == f.vertices.end())
                    f.vertices.push_back(graph_id[x]);
        }
        std::sort(f.vertices.begin(), f.vertices.end(), [&](VertexId a, VertexId b) {
            const Vec2 da = g.positions[a] - f.circumcenter, db = g.positions[b] - f.circumcenter;
            return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
        });
        g.faces.push_back(std::move(f));
    }
    g.tiling = std::move(tiling);
    g.finalize();
    return g;
}

} // namespace

IsoradialGraph build_isoradial(std::shared_ptr<const RhombicTiling> tiling, int colour_class) {
    if (!tiling) throw Error(ErrorKind::MissingSource, "no tiling given");
    if (colour_class != 0 && colour_class != 1) throw Error(ErrorKind::InvalidParameter, "colour class must be 0 or 1");
    const auto report = validate_tiling(*tiling);
    if (!report.ok()) {
        std::string msg = "tiling failed validation:";
        for (const auto& f : report.failures()) msg += " [" + f + "]";
        throw Error(ErrorKind::Validation, msg);
    }
    auto mask = std::make_shared<const PatchMask>(*tiling);
    IsoradialGraph g = build_unchecked(std::move(tiling), colour_class);
    g.mask = std::move(mask);
    return g;
}

IsoradialGraph build_isoradial(const RhombicTiling& tiling, int colour_class) {
    return build_isoradial(std::make_shared<const RhombicTiling>(tiling), colour_class);
}

IsoradialGraph dual_graph(const IsoradialGraph& g) {
    if (!g.tiling) throw Error(ErrorKind::MissingSource, "graph has no source tiling");
    IsoradialGraph d = build_unchecked(g.tiling, 1 - g.colour_class);
    d.mask = g.mask;
    return d;
}

IsoradialGraph restrict_to_box(const IsoradialGraph& g, const OrientedBox& box) {
    IsoradialGraph out;
    std::vector<VertexId> new_id(g.vertex_count(), kNoId);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!box.contains(g.positions[v])) continue;
        new_id[v] = static_cast<VertexId>(out.positions.size());
        out.positions.push_back(g.positions[v]);
        if (!g.tiling_vertex.empty()) out.tiling_vertex.push_back(g.tiling_vertex[v]);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edges[e];
        if (new_id[u] == kNoId || new_id[v] == kNoId) continue;
        out.edges.push_back({new_id[u], new_id[v]});
        out.theta.push_back(g.theta[e]);
        if (!g.edge_rhombus.empty()) out.edge_rhombus.push_back(g.edge_rhombus[e]);
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (new_id[v] == kNoId) continue;
        bool cut = g.is_boundary(v);
        for (VertexId w : g.neighbours(v)) cut = cut || new_id[w] == kNoId;
        if (cut) out.boundary.push_back(new_id[v]);
    }
    for (const Face& f : g.faces) {
        Face nf{{}, f.circumcenter};
        for (VertexId v : f.vertices) {
            if (new_id[v] == kNoId) break;
            nf.vertices.push_back(new_id[v]);
        }
        if (nf.vertices.size() == f.vertices.size()) out.faces.push_back(std::move(nf));
    }
    out.mask = g.mask;
    out.colour_class = g.colour_class;
    out.finalize();
    return out;
}

// ---------------------------------------------------------------------------
// Weights

namespace {

void check_theta(double theta) {
    if (!(theta > 0 && theta < kPi)) throw Error(ErrorKind::InvalidAngle, "edge angle outside (0, pi)");
}

void check_beta(double beta) {
    if (!(beta > 0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidParameter, "beta must be positive");
}

} // namespace

double canonical_percolation_p(double theta, double beta) {
    check_theta(theta);
    check_beta(beta);
    const double ratio = beta * std::sin((kPi - theta) / 3) / std::sin(theta / 3);
    return ratio / (1 + ratio);
}

EdgeWeights percolation_weights(const IsoradialGraph& g, double beta) {
    check_beta(beta);
    EdgeWeights w;
    w.model = Model::Percolation;
    w.beta = beta;
    w.p.reserve(g.edge_count());
    w.y.reserve(g.edge_count());
    for (double theta : g.theta) {
        check_theta(theta);
        const double y = beta * std::sin((kPi - theta) / 3) / std::sin(theta / 3);
        w.y.push_back(y);
        w.p.push_back(y / (1 + y));
    }
    return w;
}

EdgeWeights uniform_percolation_weights(std::size_t edge_count, double p) {
    if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::InvalidParameter, "p must lie in [0, 1]");
    EdgeWeights w;
    w.model = Model::Percolation;
    w.p.assign(edge_count, p);
    w.y.assign(edge_count, p < 1 ? p / (1 - p) : std::numeric_limits<double>::infinity());
    return w;
}

RcSigma rc_sigma(double q) {
    if (!(q >= 1) || !std::isfinite(q)) throw Error(ErrorKind::UnsupportedParameter, "random-cluster q must be >= 1");
    if (std::abs(q - 4) < 1e-9) return {0.0, SigmaBranch::Critical};
    if (q < 4) return {2 / kPi * std::acos(std::sqrt(q) / 2), SigmaBranch::Trigonometric};
    return {2 / kPi * std::acosh(std::sqrt(q) / 2), SigmaBranch::Hyperbolic};
}

double canonical_rc_y(double theta, double q) {
    check_theta(theta);
    const RcSigma s = rc_sigma(q);
    switch (s.branch) {
    case SigmaBranch::Critical:
        return 2 * (kPi - theta) / theta;
    case SigmaBranch::Trigonometric:
        return std::sqrt(q) * std::sin(s.sigma * (kPi - theta) / 2) / std::sin(s.sigma * theta / 2);
    case SigmaBranch::Hyperbolic:
        return std::sqrt(q) * std::sinh(s.sigma * (kPi - theta) / 2) / std::sinh(s.sigma * theta / 2);
    }
    return 0.0;
}

EdgeWeights rc_weights(const IsoradialGraph& g, double q, double beta) {
    rc_sigma(q);
    check_beta(beta);
    EdgeWeights w;
    w.model = Model::RandomCluster;
    w.q = q;
    w.beta = beta;
    w.p.reserve(g.edge_count());
    w.y.reserve(g.edge_count());
    for (double theta : g.theta) {
        const double y = beta * canonical_rc_y(theta, q);
        w.y.push_back(y);
        w.p.push_back(y / (1 + y));
    }
    return w;
}

EdgeWeights uniform_rc_weights(std::size_t edge_count, double q, double p) {
    rc_sigma(q);
    if (!(p > 0 && p < 1)) throw Error(ErrorKind::InvalidParameter, "p must lie in (0, 1)");
    EdgeWeights w;
    w.model = Model::RandomCluster;
    w.q = q;
    w.p.assign(edge_count, p);
    w.y.assign(edge_count, p / (1 - p));
    return w;
}

} // namespace isoperc
