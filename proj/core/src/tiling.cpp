#include "isoperc/tiling.hpp"

#include "isoperc/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace isoperc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTol = 1e-9;

QuantKey quantize(Vec2 p) noexcept {
    return {std::llround(p.x / kVertexQuantum), std::llround(p.y / kVertexQuantum)};
}

std::uint64_t side_key(VertexId u, VertexId v) noexcept {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

} // namespace

Rhombus Rhombus::make(Vec2 base, Vec2 dir_a, Vec2 dir_b, std::optional<GridTag> tag) {
    if (std::abs(norm(dir_a) - 1.0) > kUnitTol || std::abs(norm(dir_b) - 1.0) > kUnitTol)
        throw Error(ErrorKind::InvalidParameter, "rhombus sides must have unit length");
    if (std::abs(cross(dir_a, dir_b)) <= 1e-9)
        throw Error(ErrorKind::InvalidParameter, "rhombus sides are parallel");
    Rhombus r{base, dir_a, dir_b, tag};
    if (cross(dir_a, dir_b) < 0) {
        std::swap(r.dir_a, r.dir_b);
        if (r.grid_tag) {
            std::swap(r.grid_tag->family_a, r.grid_tag->family_b);
            std::swap(r.grid_tag->line_a, r.grid_tag->line_b);
        }
    }
    return r;
}

RhombicTiling RhombicTiling::from_rhombi(std::vector<Rhombus> rhombi) {
    RhombicTiling t;
    t.rhombi_ = std::move(rhombi);
    const std::size_t n = t.rhombi_.size();
    t.corners_.resize(n);
    t.across_.assign(n, {});

    auto intern = [&t](Vec2 p) -> VertexId {
        const QuantKey k = quantize(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = t.vertex_index_.find({k.x + dx, k.y + dy});
                if (it != t.vertex_index_.end() && norm(t.vertices_[it->second] - p) < 2 * kVertexQuantum)
                    return it->second;
            }
        }
        const auto id = static_cast<VertexId>(t.vertices_.size());
        t.vertices_.push_back(p);
        t.vertex_index_.emplace(k, id);
        return id;
    };

    for (std::size_t r = 0; r < n; ++r) {
        Rhombus& rh = t.rhombi_[r];
        const double c = cross(rh.dir_a, rh.dir_b);
        if (!(std::abs(c) > 1e-12) || !std::isfinite(c))
            throw Error(ErrorKind::InvalidParameter, "degenerate rhombus " + std::to_string(r));
        if (c < 0) {
            std::swap(rh.dir_a, rh.dir_b);
            if (rh.grid_tag) {
                std::swap(rh.grid_tag->family_a, rh.grid_tag->family_b);
                std::swap(rh.grid_tag->line_a, rh.grid_tag->line_b);
            }
        }
        const auto pts = rh.corners();
        for (int k = 0; k < 4; ++k) t.corners_[r][k] = intern(pts[k]);
    }

    // Side adjacency. A side used by more than two rhombi keeps only the
    // first two links; validate_tiling reports the multiplicity.
    std::unordered_map<std::uint64_t, SideLink> first_user;
    first_user.reserve(2 * n);
    t.side_counts_.reserve(2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (int s = 0; s < 4; ++s) {
            const auto key = side_key(t.corners_[r][s], t.corners_[r][(s + 1) % 4]);
            const auto count = ++t.side_counts_[key];
            const SideLink self{static_cast<RhombusId>(r), static_cast<std::uint8_t>(s)};
            if (count == 1) {
                first_user.emplace(key, self);
            } else if (count == 2) {
                const SideLink other = first_user.at(key);
                t.across_[r][s] = other;
                t.across_[other.rhombus][other.side] = self;
            }
        }
    }

    // Vertex -> incident rhombi (CSR).
    const std::size_t nv = t.vertices_.size();
    t.incident_offset_.assign(nv + 1, 0);
    for (const auto& cs : t.corners_)
        for (VertexId v : cs) ++t.incident_offset_[v + 1];
    for (std::size_t v = 0; v < nv; ++v) t.incident_offset_[v + 1] += t.incident_offset_[v];
    t.incident_.resize(t.incident_offset_[nv]);
    {
        std::vector<std::uint32_t> fill(t.incident_offset_.begin(), t.incident_offset_.end() - 1);
        for (std::size_t r = 0; r < n; ++r)
            for (VertexId v : t.corners_[r]) t.incident_[fill[v]++] = static_cast<RhombusId>(r);
    }

    // 2-colouring over rhombus sides.
    t.colour_.assign(nv, -1);
    std::deque<VertexId> queue;
    for (VertexId root = 0; root < nv; ++root) {
        if (t.colour_[root] >= 0) continue;
        t.colour_[root] = 0;
        queue.push_back(root);
        while (!queue.empty()) {
            const VertexId v = queue.front();
            queue.pop_front();
            for (RhombusId r : t.incident(v)) {
                const auto& cs = t.corners_[r];
                const int k = static_cast<int>(std::find(cs.begin(), cs.end(), v) - cs.begin());
                for (VertexId w : {cs[(k + 1) % 4], cs[(k + 3) % 4]}) {
                    if (t.colour_[w] < 0) {
                        t.colour_[w] = static_cast<std::int8_t>(1 - t.colour_[v]);
                        queue.push_back(w);
                    } else if (t.colour_[w] == t.colour_[v]) {
                        t.bipartite_ = false;
                    }
                }
            }
        }
    }

    if (nv > 0) {
        Vec2 lo = t.vertices_[0], hi = t.vertices_[0];
        for (Vec2 p : t.vertices_) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        t.window_ = {lo, hi};
    }
    return t;
}

std::span<const RhombusId> RhombicTiling::incident(VertexId v) const {
    return {incident_.data() + incident_offset_.at(v), incident_offset_.at(v + 1) - incident_offset_[v]};
}

double RhombicTiling::angle_sum(VertexId v) const {
    double sum = 0.0;
    for (RhombusId r : incident(v)) {
        const auto& cs = corners_[r];
        const auto k = std::find(cs.begin(), cs.end(), v) - cs.begin();
        const double a = rhombi_[r].angle();
        sum += (k % 2 == 0) ? a : kPi - a;
    }
    return sum;
}

bool RhombicTiling::is_interior(VertexId v) const {
    return std::abs(angle_sum(v) - 2 * kPi) < 1e-7;
}

std::optional<VertexId> RhombicTiling::find_vertex(Vec2 p) const {
    const QuantKey k = quantize(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            auto it = vertex_index_.find({k.x + dx, k.y + dy});
            if (it != vertex_index_.end() && norm(vertices_[it->second] - p) < 2 * kVertexQuantum)
                return it->second;
        }
    }
    return std::nullopt;
}

int RhombicTiling::side_multiplicity(VertexId u, VertexId v) const {
    auto it = side_counts_.find(side_key(u, v));
    return it == side_counts_.end() ? 0 : static_cast<int>(it->second);
}

// ---------------------------------------------------------------------------
// Generators

RhombicTiling periodic_tiling(PeriodicKind kind, int window_size, double angle) {
    if (window_size < 1) throw Error(ErrorKind::EmptyWindow, "window_size must be >= 1");
    std::vector<Rhombus> rhombi;
    switch (kind) {
    case PeriodicKind::Square:
        angle = kPi / 2;
        [[fallthrough]];
    case PeriodicKind::CustomAngle: {
        if (!(angle > 0 && angle < kPi)) throw Error(ErrorKind::InvalidAngle, "angle must lie in (0, pi)");
        const Vec2 a{1.0, 0.0};
        const Vec2 b = kind == PeriodicKind::Square ? Vec2{0.0, 1.0} : unit_vector(angle);
        rhombi.reserve(static_cast<std::size_t>(window_size) * window_size);
        for (int j = 0; j < window_size; ++j)
            for (int i = 0; i < window_size; ++i)
                rhombi.push_back(Rhombus::make(a * i + b * j, a, b));
        break;
    }
    case PeriodicKind::TriangularHexagonal: {
        // Triangular lattice with edge sqrt(3); each lattice edge is the
        // diagonal of a rhombus whose other corners are the circumcentres of
        // the two adjacent triangles.
        const double s3 = std::sqrt(3.0);
        const Vec2 A{s3, 0.0};
        const Vec2 B{s3 / 2, 1.5};
        auto add_edge = [&rhombi](Vec2 u, Vec2 v) {
            const Vec2 mid = (u + v) * 0.5;
            const Vec2 along = v - u;
            const Vec2 normal = Vec2{-along.y, along.x} / norm(along) * 0.5;
            rhombi.push_back(Rhombus::make(u, mid - normal - u, mid + normal - u));
        };
        const int n = window_size;
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i <= n; ++i) {
                const Vec2 v = A * i + B * j;
                if (i < n) add_edge(v, v + A);
                if (j < n) add_edge(v, v + B);
                if (i < n && j < n) add_edge(v + A, v + B);
            }
        }
        break;
    }
    }
    return RhombicTiling::from_rhombi(std::move(rhombi));
}

RhombicTiling multigrid_tiling(std::span<const Vec2> directions, std::span<const double> offsets,
                               double window_size) {
    const std::size_t k = directions.size();
    if (k < 2) throw Error(ErrorKind::InvalidDirections, "need at least two grid families");
    if (offsets.size() != k) throw Error(ErrorKind::InvalidParameter, "one offset per direction required");
    if (!(window_size > 0)) throw Error(ErrorKind::EmptyWindow, "window_size must be positive");
    for (std::size_t j = 0; j < k; ++j) {
        if (std::abs(norm(directions[j]) - 1.0) > kUnitTol)
            throw Error(ErrorKind::InvalidDirections, "grid directions must be unit vectors");
        for (std::size_t l = j + 1; l < k; ++l)
            if (std::abs(cross(directions[j], directions[l])) < 1e-9)
                throw Error(ErrorKind::InvalidDirections, "grid directions must be pairwise non-parallel");
    }

    const double half = window_size / static_cast<double>(k);  // half side in grid space
    auto line_range = [half](Vec2 e, double gamma) {
        const double reach = half * (std::abs(e.x) + std::abs(e.y));
        return std::pair<std::int64_t, std::int64_t>{
            static_cast<std::int64_t>(std::floor(-reach + gamma)) - 1,
            static_cast<std::int64_t>(std::ceil(reach + gamma)) + 1};
    };

    std::vector<Rhombus> rhombi;
    for (std::size_t j = 0; j < k; ++j) {
        const Vec2 ej = directions[j];
        const auto [jlo, jhi] = line_range(ej, offsets[j]);
        for (std::size_t l = j + 1; l < k; ++l) {
            const Vec2 el = directions[l];
            const auto [llo, lhi] = line_range(el, offsets[l]);
            const double det = cross(ej, el);
            for (std::int64_t kj = jlo; kj <= jhi; ++kj) {
                for (std::int64_t kl = llo; kl <= lhi; ++kl) {
                    // <x,ej> = kj - gj, <x,el> = kl - gl
                    const double rj = static_cast<double>(kj) - offsets[j];
                    const double rl = static_cast<double>(kl) - offsets[l];
                    const Vec2 x{(rj * el.y - rl * ej.y) / det, (ej.x * rl - el.x * rj) / det};
                    if (x.x < -half || x.x >= half || x.y < -half || x.y >= half) continue;
                    Vec2 base = ej * static_cast<double>(kj) + el * static_cast<double>(kl);
                    for (std::size_t m = 0; m < k; ++m) {
                        if (m == j || m == l) continue;
                        const double coord = dot(x, directions[m]) + offsets[m];
                        if (std::abs(coord - std::round(coord)) < 1e-9)
                            throw Error(ErrorKind::DegenerateOffsets,
                                        "three grid lines meet near (" + std::to_string(x.x) + ", " +
                                            std::to_string(x.y) + ")");
                        base += directions[m] * std::ceil(coord);
                    }
                    rhombi.push_back(Rhombus::make(base, ej, el,
                                                   GridTag{static_cast<int>(j), kj, static_cast<int>(l), kl}));
                }
            }
        }
    }
    return RhombicTiling::from_rhombi(std::move(rhombi));
}

std::vector<double> default_penrose_offsets() { return {0.13, 0.21, 0.34, 0.07, 0.25}; }

RhombicTiling penrose_tiling(double window_size) {
    std::vector<Vec2> dirs;
    for (int j = 0; j < 5; ++j) dirs.push_back(unit_vector(2 * kPi * j / 5));
    const auto offsets = default_penrose_offsets();
    return multigrid_tiling(dirs, offsets, window_size);
}

// ---------------------------------------------------------------------------
// Tracks

namespace {

struct TrackTrace {
    std::vector<Track> tracks;
    // track id for node 2*r + d (d = 0: crosses sides 0/2, d = 1: sides 1/3)
    std::vector<std::uint32_t> track_of;
};

Vec2 canonical_direction(Vec2 d) {
    if (d.y < -1e-12 || (std::abs(d.y) <= 1e-12 && d.x < 0)) return -d;
    return d;
}

TrackTrace trace_tracks(const RhombicTiling& t) {
    const std::size_t n = t.size();
    TrackTrace out;
    out.track_of.assign(2 * n, kNoId);

    // neighbour of node (r,d) through side s in {d, d+2}
    auto step = [&t](std::uint32_t node, int which) -> std::uint32_t {
        const RhombusId r = node / 2;
        const int d = static_cast<int>(node % 2);
        const SideLink link = t.across(r, d + 2 * which);
        if (link.rhombus == kNoId) return kNoId;
        return 2 * link.rhombus + (link.side % 2);
    };
    auto degree = [&](std::uint32_t node) { return (step(node, 0) != kNoId) + (step(node, 1) != kNoId); };

    auto walk = [&](std::uint32_t start, bool closed) {
        Track tr;
        tr.closed = closed;
        const auto id = static_cast<std::uint32_t>(out.tracks.size());
        std::uint32_t prev = kNoId, cur = start;
        while (cur != kNoId && out.track_of[cur] == kNoId) {
            out.track_of[cur] = id;
            tr.rhombus_sequence.push_back(cur / 2);
            std::uint32_t next = kNoId;
            for (std::uint32_t cand : {step(cur, 0), step(cur, 1)}) {
                if (cand != kNoId && cand != prev && out.track_of[cand] == kNoId) {
                    next = cand;
                    break;
                }
            }
            prev = cur;
            cur = next;
        }
        const RhombusId r0 = start / 2;
        const Rhombus& rh = t.rhombus(r0);
        tr.transverse_direction = canonical_direction(start % 2 == 0 ? rh.dir_a : rh.dir_b);
        if (rh.grid_tag) tr.family = start % 2 == 0 ? rh.grid_tag->family_a : rh.grid_tag->family_b;
        out.tracks.push_back(std::move(tr));
    };

    for (std::uint32_t node = 0; node < 2 * n; ++node)
        if (out.track_of[node] == kNoId && degree(node) < 2) walk(node, false);
    for (std::uint32_t node = 0; node < 2 * n; ++node)
        if (out.track_of[node] == kNoId) walk(node, true);
    return out;
}

// Separating-axis test for two convex quadrilaterals; true when their
// interiors overlap by more than `tol`.
bool interiors_overlap(const std::array<Vec2, 4>& p, const std::array<Vec2, 4>& q, double tol) {
    auto separated_on = [&](Vec2 axis) {
        double pmin = 1e300, pmax = -1e300, qmin = 1e300, qmax = -1e300;
        for (Vec2 v : p) { const double d = dot(v, axis); pmin = std::min(pmin, d); pmax = std::max(pmax, d); }
        for (Vec2 v : q) { const double d = dot(v, axis); qmin = std::min(qmin, d); qmax = std::max(qmax, d); }
        return std::min(pmax, qmax) - std::max(pmin, qmin) <= tol;
    };
    for (const auto* poly : {&p, &q}) {
        for (int s = 0; s < 4; ++s) {
            const Vec2 e = (*poly)[(s + 1) % 4] - (*poly)[s];
            const double len = norm(e);
            if (len == 0) continue;
            if (separated_on(Vec2{-e.y, e.x} / len)) return false;
        }
    }
    return true;
}

struct CellKey {
    std::int64_t x, y;
    bool operator<(const CellKey& o) const { return x != o.x ? x < o.x : y < o.y; }
};

} // namespace

bool ValidationReport::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* ValidationReport::find(std::string_view name) const noexcept {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.passed) out.push_back(c.name + ": " + c.detail);
    return out;
}

namespace {

void geometric_checks(const RhombicTiling& t, ValidationReport& report) {
    const std::size_t n = t.size();
    const auto& verts = t.vertices();

    {
        CheckResult c{"unit_sides", true, ""};
        for (RhombusId r = 0; r < n && c.passed; ++r) {
            const auto& cs = t.corners(r);
            for (int s = 0; s < 4; ++s) {
                const double len = norm(verts[cs[(s + 1) % 4]] - verts[cs[s]]);
                if (std::abs(len - 1.0) > kUnitTol) {
                    c.passed = false;
                    c.detail = "rhombus " + std::to_string(r) + " side " + std::to_string(s) + " has length " +
                               std::to_string(len);
                    break;
                }
            }
        }
        report.checks.push_back(std::move(c));
    }

    {
        CheckResult c{"edge_to_edge", true, ""};
        for (RhombusId r = 0; r < n && c.passed; ++r) {
            const auto& cs = t.corners(r);
            for (int s = 0; s < 4 && c.passed; ++s) {
                const VertexId u = cs[s], v = cs[(s + 1) % 4];
                const int mult = t.side_multiplicity(u, v);
                if (mult > 2) {
                    c.passed = false;
                    c.detail = "side used by " + std::to_string(mult) + " rhombi";
                    break;
                }
                const SideLink other = t.across(r, s);
                if (other.rhombus != kNoId) {
                    const auto& oc = t.corners(other.rhombus);
                    // neighbours must traverse a shared side in opposite directions
                    if (oc[other.side] != v || oc[(other.side + 1) % 4] != u) {
                        c.passed = false;
                        c.detail = "rhombi " + std::to_string(r) + " and " + std::to_string(other.rhombus) +
                                   " fold over a shared side";
                    }
                }
            }
        }
        if (c.passed) {
            // T-junctions: a vertex strictly inside some side.
            std::map<CellKey, std::vector<VertexId>> cells;
            for (VertexId v = 0; v < verts.size(); ++v)
                cells[{static_cast<std::int64_t>(std::floor(verts[v].x)),
                       static_cast<std::int64_t>(std::floor(verts[v].y))}]
                    .push_back(v);
            for (RhombusId r = 0; r < n && c.passed; ++r) {
                const auto& cs = t.corners(r);
                for (int s = 0; s < 4 && c.passed; ++s) {
                    const Vec2 a = verts[cs[s]], b = verts[cs[(s + 1) % 4]];
                    const Vec2 d = b - a;
                    const double len2 = dot(d, d);
                    const auto x0 = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x))) - 1;
                    const auto x1 = static_cast<std::int64_t>(std::floor(std::max(a.x, b.x))) + 1;
                    const auto y0 = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y))) - 1;
                    const auto y1 = static_cast<std::int64_t>(std::floor(std::max(a.y, b.y))) + 1;
                    for (auto cx = x0; cx <= x1 && c.passed; ++cx) {
                        for (auto cy = y0; cy <= y1 && c.passed; ++cy) {
                            auto it = cells.find({cx, cy});
                            if (it == cells.end()) continue;
                            for (VertexId w : it->second) {
                                if (w == cs[s] || w == cs[(s + 1) % 4]) continue;
                                const double tpar = dot(verts[w] - a, d) / len2;
                                if (tpar <= 1e-6 || tpar >= 1 - 1e-6) continue;
                                if (std::abs(cross(d, verts[w] - a)) / std::sqrt(len2) < 1e-7) {
                                    c.passed = false;
                                    c.detail = "vertex " + std::to_string(w) + " lies inside a side of rhombus " +
                                               std::to_string(r);
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
        report.checks.push_back(std::move(c));
    }

    {
        CheckResult c{"non_overlap", true, ""};
        std::map<CellKey, std::vector<RhombusId>> cells;
        auto cell_of = [](Vec2 p) {
            return CellKey{static_cast<std::int64_t>(std::floor(p.x / 2.0)),
                           static_cast<std::int64_t>(std::floor(p.y / 2.0))};
        };
        for (RhombusId r = 0; r < n; ++r) cells[cell_of(t.rhombus(r).center())].push_back(r);
        for (RhombusId r = 0; r < n && c.passed; ++r) {
            const auto pr = t.rhombus(r).corners();
            const CellKey k = cell_of(t.rhombus(r).center());
            for (std::int64_t dx = -1; dx <= 1 && c.passed; ++dx) {
                for (std::int64_t dy = -1; dy <= 1 && c.passed; ++dy) {
                    auto it = cells.find({k.x + dx, k.y + dy});
                    if (it == cells.end()) continue;
                    for (RhombusId o : it->second) {
                        if (o <= r) continue;
                        if (interiors_overlap(pr, t.rhombus(o).corners(), 1e-9)) {
                            c.passed = false;
                            c.detail = "rhombi " + std::to_string(r) + " and " + std::to_string(o) + " overlap";
                            break;
                        }
                    }
                }
            }
        }
        report.checks.push_back(std::move(c));
    }

    {
        // Green's theorem over the boundary sides against the summed areas.
        CheckResult c{"area_balance", true, ""};
        double rhombus_area = 0.0, enclosed = 0.0;
        for (RhombusId r = 0; r < n; ++r) {
            rhombus_area += t.rhombus(r).area();
            const auto& cs = t.corners(r);
            for (int s = 0; s < 4; ++s) {
                if (t.side_multiplicity(cs[s], cs[(s + 1) % 4]) == 1)
                    enclosed += 0.5 * cross(verts[cs[s]], verts[cs[(s + 1) % 4]]);
            }
        }
        if (std::abs(enclosed - rhombus_area) > 1e-6 * std::max(rhombus_area, 1.0)) {
            c.passed = false;
            std::ostringstream os;
            os << "rhombus area " << rhombus_area << " vs enclosed area " << enclosed;
            c.detail = os.str();
        }
        report.checks.push_back(std::move(c));
    }

    report.checks.push_back({"bipartite", t.bipartite(), t.bipartite() ? "" : "odd cycle in tiling graph"});
}

void track_checks(const RhombicTiling& t, const TrackTrace& trace, ValidationReport& report) {
    CheckResult simple{"tracks_simple", true, ""};
    CheckResult once{"tracks_cross_once", true, ""};
    std::unordered_map<std::uint64_t, int> crossings;
    for (RhombusId r = 0; r < t.size(); ++r) {
        const std::uint32_t a = trace.track_of[2 * r], b = trace.track_of[2 * r + 1];
        if (a == b) {
            if (simple.passed) simple.detail = "track " + std::to_string(a) + " crosses itself at rhombus " + std::to_string(r);
            simple.passed = false;
            continue;
        }
        const auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
        if (++crossings[key] > 1 && once.passed) {
            once.passed = false;
            once.detail = "tracks " + std::to_string(a) + " and " + std::to_string(b) + " cross twice";
        }
    }
    for (std::size_t i = 0; i < trace.tracks.size() && simple.passed; ++i) {
        if (trace.tracks[i].closed) {
            simple.passed = false;
            simple.detail = "track " + std::to_string(i) + " is closed";
        }
    }
    report.checks.push_back(std::move(simple));
    report.checks.push_back(std::move(once));
}

} // namespace

ValidationReport validate_tiling(const RhombicTiling& tiling) {
    ValidationReport report;
    geometric_checks(tiling, report);
    track_checks(tiling, trace_tracks(tiling), report);
    return report;
}

std::vector<Track> extract_tracks(const RhombicTiling& tiling) {
    ValidationReport report;
    geometric_checks(tiling, report);
    TrackTrace trace = trace_tracks(tiling);
    track_checks(tiling, trace, report);
    if (!report.ok()) {
        std::string msg = "tiling failed validation:";
        for (const auto& f : report.failures()) msg += " [" + f + "]";
        throw Error(ErrorKind::Validation, msg);
    }
    return std::move(trace.tracks);
}

double bap_epsilon(const RhombicTiling& tiling) {
    if (tiling.empty()) throw Error(ErrorKind::EmptyWindow, "tiling has no rhombi");
    double eps = kPi;
    for (const auto& r : tiling.rhombi()) {
        const double a = r.angle();
        eps = std::min(eps, std::min(a, kPi - a));
    }
    return eps;
}

// ---------------------------------------------------------------------------
// Hexagon flips

bool is_flippable(const RhombicTiling& tiling, VertexId v) {
    if (v >= tiling.vertex_count()) return false;
    return tiling.incident(v).size() == 3 && tiling.is_interior(v);
}

std::vector<VertexId> flippable_vertices(const RhombicTiling& tiling) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < tiling.vertex_count(); ++v)
        if (is_flippable(tiling, v)) out.push_back(v);
    return out;
}

RhombicTiling hexagon_flip(const RhombicTiling& tiling, VertexId center) {
    if (!is_flippable(tiling, center))
        throw Error(ErrorKind::NotFlippable, "vertex " + std::to_string(center) + " is not a hexagon centre");
    const Vec2 c = tiling.vertices()[center];
    const auto around = tiling.incident(center);

    // Each rhombus at the centre is spanned by two of three unit vectors u0,u1,u2.
    std::vector<Vec2> spokes;
    auto spoke_index = [&spokes](Vec2 u) {
        for (std::size_t i = 0; i < spokes.size(); ++i)
            if (norm(spokes[i] - u) < 1e-6) return i;
        spokes.push_back(u);
        return spokes.size() - 1;
    };
    std::array<std::array<std::size_t, 2>, 3> pair_of{};
    for (std::size_t i = 0; i < 3; ++i) {
        const RhombusId r = around[i];
        const auto& cs = tiling.corners(r);
        const auto k = std::find(cs.begin(), cs.end(), center) - cs.begin();
        const Vec2 u = tiling.vertices()[cs[(k + 1) % 4]] - c;
        const Vec2 w = tiling.vertices()[cs[(k + 3) % 4]] - c;
        pair_of[i] = {spoke_index(u), spoke_index(w)};
    }
    if (spokes.size() != 3)
        throw Error(ErrorKind::NotFlippable, "rhombi around vertex do not form a hexagon");

    std::vector<Rhombus> rhombi = tiling.rhombi();
    for (std::size_t i = 0; i < 3; ++i) {
        const std::size_t third = 3 - pair_of[i][0] - pair_of[i][1];
        const Rhombus& old = rhombi[around[i]];
        Vec2 a = spokes[pair_of[i][0]], b = spokes[pair_of[i][1]];
        // keep the old rhombus' a/b side assignment so the grid tag stays valid
        if (std::abs(cross(old.dir_a, a)) > 1e-6) std::swap(a, b);
        rhombi[around[i]] = Rhombus::make(c + spokes[third], a, b, old.grid_tag);
    }
    RhombicTiling out = RhombicTiling::from_rhombi(std::move(rhombi));
    for (VertexId v = 0; v < out.vertex_count(); ++v) {
        if (auto old = tiling.find_vertex(out.vertices_[v]); old && *old != center)
            out.colour_[v] = tiling.colour_[*old];
    }
    // the new hexagon centre is the one vertex without a predecessor
    if (auto fresh = out.find_vertex(c + spokes[0] + spokes[1] + spokes[2])) {
        const auto& cs = out.corners(out.incident(*fresh)[0]);
        const auto k = std::find(cs.begin(), cs.end(), *fresh) - cs.begin();
        out.colour_[*fresh] = static_cast<std::int8_t>(1 - out.colour_[cs[(k + 1) % 4]]);
    }
    return out;
}

bool same_geometry(const RhombicTiling& a, const RhombicTiling& b) {
    if (a.size() != b.size()) return false;
    auto signature = [](const RhombicTiling& t) {
        std::multiset<std::array<std::int64_t, 8>> keys;
        for (const auto& r : t.rhombi()) {
            auto cs = r.corners();
            std::array<QuantKey, 4> q{};
            for (int i = 0; i < 4; ++i) q[i] = quantize(cs[i]);
            std::sort(q.begin(), q.end(), [](const QuantKey& l, const QuantKey& m) {
                return l.x != m.x ? l.x < m.x : l.y < m.y;
            });
            keys.insert({q[0].x, q[0].y, q[1].x, q[1].y, q[2].x, q[2].y, q[3].x, q[3].y});
        }
        return keys;
    };
    return signature(a) == signature(b);
}

} // namespace isoperc
