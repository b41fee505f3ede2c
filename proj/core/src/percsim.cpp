#include "isoperc/percsim.hpp"

#include "isoperc/error.hpp"
#include "isoperc/parallel.hpp"
#include "isoperc/serialize.hpp"
#include "isoperc/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace isoperc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_percolation(const EdgeWeights& w) {
    if (w.model != Model::Percolation)
        throw Error(ErrorKind::WrongModel, "percolation sampling needs percolation weights");
}

void require_match(const IsoradialGraph& g, const EdgeWeights& w) {
    require_percolation(w);
    if (w.p.size() != g.edge_count()) throw Error(ErrorKind::Shape, "weights do not match the graph");
}

struct Bounds {
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

Bounds graph_bounds(const IsoradialGraph& g) {
    Bounds b;
    for (Vec2 p : g.positions) {
        b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
        b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
    }
    return b;
}

std::size_t tail_index(const std::vector<double>& sorted, double value) {
    // number of thresholds t with value >= t
    return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), value + 1e-9) - sorted.begin());
}

ObservableCurve assemble_curve(const std::vector<double>& abscissa, const std::vector<std::vector<double>>& values,
                               std::size_t batches) {
    ObservableCurve c;
    c.abscissa = abscissa;
    for (const auto& v : values) {
        const Estimate e = summarize(v);
        c.estimate.push_back(e.value);
        c.std_error.push_back(e.std_error);
        c.samples.push_back(e.samples);
        c.batch_means.push_back(batch_means(v, batches));
    }
    return c;
}

// Per-vertex threshold counts: values[k][s] = fraction of vertices whose
// statistic reaches threshold k.
template <class Stat>
std::vector<std::vector<double>> threshold_fractions(const IsoradialGraph& g, const EdgeWeights& w,
                                                     const std::vector<double>& thresholds,
                                                     const std::vector<VertexId>& vertices, std::size_t samples,
                                                     const RunOptions& options, Stat stat) {
    std::vector<std::size_t> order(thresholds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return thresholds[a] < thresholds[b]; });
    std::vector<double> sorted;
    for (auto i : order) sorted.push_back(thresholds[i]);

    std::vector<std::vector<double>> values(thresholds.size(), std::vector<double>(samples));
    for_each_replica(samples, options.threads, [&](std::size_t s) {
        Rng rng(options.seed, s);
        std::vector<std::uint8_t> open;
        sample_open(w, rng, open);
        const auto d = cluster_decomposition(g, open);
        std::vector<std::size_t> reach(sorted.size() + 1, 0);
        for (VertexId v : vertices) ++reach[tail_index(sorted, stat(d, v))];
        // reach[j] counts vertices clearing exactly the j smallest thresholds
        std::size_t above = 0;
        std::vector<double> frac(sorted.size());
        for (std::size_t j = sorted.size(); j-- > 0;) {
            above += reach[j + 1];
            frac[j] = static_cast<double>(above) / static_cast<double>(vertices.size());
        }
        for (std::size_t j = 0; j < sorted.size(); ++j) values[order[j]][s] = frac[j];
    });
    return values;
}

} // namespace

std::size_t Configuration::open_count() const noexcept {
    return static_cast<std::size_t>(std::count(open.begin(), open.end(), std::uint8_t{1}));
}

void sample_open(const EdgeWeights& weights, Rng& rng, std::vector<std::uint8_t>& open) {
    require_percolation(weights);
    open.resize(weights.p.size());
    for (std::size_t e = 0; e < open.size(); ++e) open[e] = rng.uniform() < weights.p[e] ? 1 : 0;
}

Configuration sample_configuration(const EdgeWeights& weights, Rng& rng) {
    Configuration c;
    sample_open(weights, rng, c.open);
    c.weights_id = content_hash(weights);
    return c;
}

std::uint32_t ClusterDecomposition::largest() const noexcept {
    std::uint32_t best = 0;
    for (auto s : size) best = std::max(best, s);
    return best;
}

ClusterDecomposition cluster_decomposition(const IsoradialGraph& g, const std::vector<std::uint8_t>& open) {
    if (open.size() != g.edge_count()) throw Error(ErrorKind::Shape, "configuration does not match the graph");
    const std::size_t n = g.vertex_count();
    DisjointSets ds(n);
    for (EdgeId e = 0; e < open.size(); ++e)
        if (open[e]) ds.unite(g.edges[e].u, g.edges[e].v);
    ClusterDecomposition d;
    d.label.assign(n, kNoId);
    std::vector<std::uint32_t> root_label(n, kNoId);
    for (VertexId v = 0; v < n; ++v) {
        const auto r = ds.find(v);
        if (root_label[r] == kNoId) {
            root_label[r] = static_cast<std::uint32_t>(d.size.size());
            d.size.push_back(0);
            d.lo.push_back(g.positions[v]);
            d.hi.push_back(g.positions[v]);
        }
        const auto l = root_label[r];
        d.label[v] = l;
        ++d.size[l];
        const Vec2 p = g.positions[v];
        d.lo[l] = {std::min(d.lo[l].x, p.x), std::min(d.lo[l].y, p.y)};
        d.hi[l] = {std::max(d.hi[l].x, p.x), std::max(d.hi[l].y, p.y)};
    }
    return d;
}

double cluster_radius(const IsoradialGraph& g, const ClusterDecomposition& d, VertexId v) {
    const auto l = d.label.at(v);
    const Vec2 p = g.positions[v];
    return std::max({d.hi[l].x - p.x, p.x - d.lo[l].x, d.hi[l].y - p.y, p.y - d.lo[l].y});
}

Estimate summarize(const std::vector<double>& values) {
    Estimate e;
    e.samples = values.size();
    if (values.empty()) return e;
    double sum = 0;
    for (double v : values) sum += v;
    e.value = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - e.value) * (v - e.value);
        e.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
    }
    return e;
}

std::vector<double> batch_means(const std::vector<double>& values, std::size_t batches) {
    batches = std::min(batches, values.size());
    std::vector<double> out;
    if (batches == 0) return out;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t begin = b * values.size() / batches, end = (b + 1) * values.size() / batches;
        double s = 0;
        for (std::size_t i = begin; i < end; ++i) s += values[i];
        out.push_back(s / static_cast<double>(end - begin));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Crossings

OrientedBox square_lattice_box(Vec2 near, int rows, int cols) {
    if (rows < 2 || cols < 2) throw Error(ErrorKind::InvalidParameter, "a lattice box needs at least 2 x 2 vertices");
    const double w = (cols - 1) * std::numbers::sqrt2, h = (rows - 1) * std::numbers::sqrt2;
    const Vec2 half = rotate({w / 2, h / 2}, kPi / 4);
    const Vec2 corner = near - half;
    double x = std::round(corner.x), y = std::round(corner.y);
    if ((static_cast<long long>(x) + static_cast<long long>(y)) % 2 != 0) x += corner.x > x ? 1 : -1;
    return {Vec2{x, y} + half, w, h, kPi / 4};
}

BoxCrossing::BoxCrossing(const IsoradialGraph& g, const CrossingSpec& spec) {
    const OrientedBox& box = spec.box;
    if (!(box.width > 0 && box.height > 0)) throw Error(ErrorKind::InvalidParameter, "box sides must be positive");
    const bool horizontal = spec.direction == CrossingDirection::Horizontal;
    const double hw = box.width / 2, hh = box.height / 2;
    constexpr double tol = 1e-9;

    std::vector<std::uint32_t> local(g.vertex_count(), kNoId);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (!box.contains(g.positions[v], tol)) continue;
        local[v] = static_cast<std::uint32_t>(vertices_.size());
        vertices_.push_back(v);
    }
    side_.assign(vertices_.size(), 0);

    // side bits in the box frame: 1 left, 2 right, 4 bottom, 8 top
    auto sides_at = [&](Vec2 l) {
        unsigned s = 0;
        if (std::abs(l.x + hw) <= tol) s |= 1;
        if (std::abs(l.x - hw) <= tol) s |= 2;
        if (std::abs(l.y + hh) <= tol) s |= 4;
        if (std::abs(l.y - hh) <= tol) s |= 8;
        return s;
    };
    auto exit_sides = [&](Vec2 a, Vec2 b) {
        const Vec2 d = b - a;
        double t_exit = std::numeric_limits<double>::infinity();
        double ts[4];
        ts[0] = d.x < 0 ? (-hw - a.x) / d.x : std::numeric_limits<double>::infinity();
        ts[1] = d.x > 0 ? (hw - a.x) / d.x : std::numeric_limits<double>::infinity();
        ts[2] = d.y < 0 ? (-hh - a.y) / d.y : std::numeric_limits<double>::infinity();
        ts[3] = d.y > 0 ? (hh - a.y) / d.y : std::numeric_limits<double>::infinity();
        for (double t : ts) t_exit = std::min(t_exit, t);
        unsigned s = 0;
        for (int k = 0; k < 4; ++k)
            if (ts[k] <= t_exit + 1e-9) s |= 1u << k;
        return s;
    };
    const unsigned first = horizontal ? 1u : 4u, second = horizontal ? 2u : 8u;
    const auto n = static_cast<std::uint32_t>(vertices_.size());

    for (std::uint32_t i = 0; i < n; ++i) {
        const unsigned s = sides_at(box.to_local(g.positions[vertices_[i]]));
        side_[i] = static_cast<std::uint8_t>(((s & first) ? 1 : 0) | ((s & second) ? 2 : 0));
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const auto [u, v] = g.edges[e];
        const bool in_u = local[u] != kNoId, in_v = local[v] != kNoId;
        if (in_u && in_v) {
            edges_.push_back(e);
            local_edges_.emplace_back(local[u], local[v]);
            continue;
        }
        if (in_u == in_v) continue;
        // an edge leaving through a crossing side links its inner end to that side
        const VertexId inner = in_u ? u : v, outer = in_u ? v : u;
        const std::uint32_t i = local[inner];
        const unsigned s = exit_sides(box.to_local(g.positions[inner]), box.to_local(g.positions[outer]));
        const std::uint32_t node = (s & first) ? n : (s & second) ? n + 1 : kNoId;
        if (node == kNoId || (side_[i] & (node == n ? 1 : 2))) continue;
        edges_.push_back(e);
        local_edges_.emplace_back(i, node);
    }
}

std::size_t BoxCrossing::terminal_count(bool first_side) const {
    const std::uint8_t bit = first_side ? 1 : 2;
    return static_cast<std::size_t>(std::count_if(side_.begin(), side_.end(), [bit](std::uint8_t s) { return s & bit; }));
}

bool BoxCrossing::crosses(const std::vector<std::uint8_t>& open) const {
    const auto n = static_cast<std::uint32_t>(vertices_.size());
    DisjointSets ds(n + 2);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (side_[i] & 1) ds.unite(i, n);
        if (side_[i] & 2) ds.unite(i, n + 1);
    }
    for (std::size_t k = 0; k < local_edges_.size(); ++k)
        if (open[k]) ds.unite(local_edges_[k].first, local_edges_[k].second);
    return ds.same(n, n + 1);
}

bool BoxCrossing::crosses_graph(const std::vector<std::uint8_t>& open) const {
    std::vector<std::uint8_t> local(edges_.size());
    for (std::size_t k = 0; k < edges_.size(); ++k) local[k] = open[edges_[k]];
    return crosses(local);
}

namespace {

void check_box(const IsoradialGraph& g, const CrossingSpec& spec) {
    if (g.mask && !g.mask->contains_box(spec.box, kBoundaryMargin))
        throw Error(ErrorKind::Geometry, "crossing box is not inside the patch with the required margin");
}

} // namespace

std::vector<std::vector<std::uint8_t>> coupled_crossings(const IsoradialGraph& g,
                                                         const std::vector<EdgeWeights>& weights,
                                                         const CrossingSpec& spec, std::size_t samples,
                                                         const RunOptions& options) {
    for (const auto& w : weights) require_match(g, w);
    check_box(g, spec);
    const BoxCrossing crossing(g, spec);
    std::vector<std::vector<std::uint8_t>> out(weights.size(), std::vector<std::uint8_t>(samples));
    for_each_replica(samples, options.threads, [&](std::size_t s) {
        Rng rng(options.seed, s);
        std::vector<double> u(crossing.edge_count());
        for (double& x : u) x = rng.uniform();
        std::vector<std::uint8_t> open(u.size());
        for (std::size_t w = 0; w < weights.size(); ++w) {
            for (std::size_t k = 0; k < u.size(); ++k) open[k] = u[k] < weights[w].p[crossing.graph_edge(k)];
            out[w][s] = crossing.crosses(open);
        }
    });
    return out;
}

Estimate crossing_probability(const IsoradialGraph& g, const EdgeWeights& weights, const CrossingSpec& spec,
                              std::size_t samples, const RunOptions& options) {
    const auto hits = coupled_crossings(g, {weights}, spec, samples, options);
    std::vector<double> v(hits[0].begin(), hits[0].end());
    return summarize(v);
}

double exact_crossing_probability(const IsoradialGraph& g, const EdgeWeights& weights, const CrossingSpec& spec) {
    require_match(g, weights);
    const BoxCrossing crossing(g, spec);
    const std::size_t m = crossing.edge_count();
    if (m > 24) throw Error(ErrorKind::Size, "too many box edges to enumerate");
    double total = 0;
    std::vector<std::uint8_t> open(m);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
        double w = 1;
        for (std::size_t k = 0; k < m; ++k) {
            open[k] = bits >> k & 1u;
            const double p = weights.p[crossing.graph_edge(k)];
            w *= open[k] ? p : 1 - p;
        }
        if (w > 0 && crossing.crosses(open)) total += w;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Observable curves

std::vector<VertexId> interior_vertices(const IsoradialGraph& g, double clearance) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (g.clearance(g.positions[v]) >= clearance) out.push_back(v);
    return out;
}

double patch_scale(const IsoradialGraph& g) {
    if (g.vertex_count() == 0) return 0.0;
    const Bounds b = graph_bounds(g);
    return std::min(b.hi.x - b.lo.x, b.hi.y - b.lo.y);
}

namespace {

std::vector<VertexId> measurement_vertices(const IsoradialGraph& g, double reach) {
    auto v = interior_vertices(g, reach + kBoundaryMargin);
    if (v.empty()) throw Error(ErrorKind::Geometry, "no vertex is far enough inside the patch");
    return v;
}

} // namespace

ObservableCurve one_arm_curve(const IsoradialGraph& g, const EdgeWeights& weights, const std::vector<double>& radii,
                              std::size_t samples, const RunOptions& options) {
    require_match(g, weights);
    if (radii.empty()) return {};
    const double kmax = *std::max_element(radii.begin(), radii.end());
    const auto vertices = measurement_vertices(g, kmax);
    const auto values = threshold_fractions(g, weights, radii, vertices, samples, options,
                                            [&g](const ClusterDecomposition& d, VertexId v) { return cluster_radius(g, d, v); });
    return assemble_curve(radii, values, options.batches);
}

ObservableCurve volume_tail_curve(const IsoradialGraph& g, const EdgeWeights& weights,
                                  const std::vector<double>& sizes, std::size_t samples, const RunOptions& options) {
    require_match(g, weights);
    if (sizes.empty()) return {};
    const auto vertices = measurement_vertices(g, patch_scale(g) / 4);
    const auto values = threshold_fractions(g, weights, sizes, vertices, samples, options,
                                            [](const ClusterDecomposition& d, VertexId v) {
                                                return static_cast<double>(d.size[d.label[v]]);
                                            });
    return assemble_curve(sizes, values, options.batches);
}

ObservableCurve two_point_curve(const IsoradialGraph& g, const EdgeWeights& weights,
                                const std::vector<double>& distances, std::size_t samples,
                                const RunOptions& options, Vec2 direction) {
    require_match(g, weights);
    if (distances.empty()) return {};
    if (norm(direction) == 0) throw Error(ErrorKind::InvalidParameter, "direction must be nonzero");
    direction = direction / norm(direction);
    const VertexLocator locate(g);
    std::vector<std::vector<std::pair<VertexId, VertexId>>> pairs(distances.size());
    for (std::size_t k = 0; k < distances.size(); ++k) {
        for (VertexId v : measurement_vertices(g, distances[k])) {
            const auto w = locate.nearest(g.positions[v] + direction * distances[k]);
            if (w) pairs[k].emplace_back(v, *w);
        }
    }
    std::vector<std::vector<double>> values(distances.size(), std::vector<double>(samples));
    for_each_replica(samples, options.threads, [&](std::size_t s) {
        Rng rng(options.seed, s);
        std::vector<std::uint8_t> open;
        sample_open(weights, rng, open);
        const auto d = cluster_decomposition(g, open);
        for (std::size_t k = 0; k < distances.size(); ++k) {
            std::size_t hit = 0;
            for (const auto& [v, w] : pairs[k]) hit += d.label[v] == d.label[w];
            values[k][s] = static_cast<double>(hit) / static_cast<double>(pairs[k].size());
        }
    });
    return assemble_curve(distances, values, options.batches);
}

VertexLocator::VertexLocator(const IsoradialGraph& g) : g_(&g) {
    if (g.vertex_count() == 0) return;
    const Bounds b = graph_bounds(g);
    origin_ = b.lo;
    nx_ = static_cast<int>(std::floor(b.hi.x - b.lo.x)) + 1;
    ny_ = static_cast<int>(std::floor(b.hi.y - b.lo.y)) + 1;
    offset_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    auto cell = [&](Vec2 p) {
        const int i = std::min(nx_ - 1, static_cast<int>(std::floor(p.x - origin_.x)));
        const int j = std::min(ny_ - 1, static_cast<int>(std::floor(p.y - origin_.y)));
        return static_cast<std::size_t>(j) * nx_ + i;
    };
    for (Vec2 p : g.positions) ++offset_[cell(p) + 1];
    for (std::size_t c = 0; c + 1 < offset_.size(); ++c) offset_[c + 1] += offset_[c];
    items_.resize(g.vertex_count());
    std::vector<std::uint32_t> fill(offset_.begin(), offset_.end() - 1);
    for (VertexId v = 0; v < g.vertex_count(); ++v) items_[fill[cell(g.positions[v])]++] = v;
}

std::optional<VertexId> VertexLocator::nearest(Vec2 p) const {
    if (items_.empty()) return std::nullopt;
    const int ci = static_cast<int>(std::floor(p.x - origin_.x));
    const int cj = static_cast<int>(std::floor(p.y - origin_.y));
    std::optional<VertexId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int radius = 1; radius <= 3 && !best; ++radius) {
        for (int j = cj - radius; j <= cj + radius; ++j) {
            for (int i = ci - radius; i <= ci + radius; ++i) {
                if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                const std::size_t c = static_cast<std::size_t>(j) * nx_ + i;
                for (std::uint32_t k = offset_[c]; k < offset_[c + 1]; ++k) {
                    const double d = norm(g_->positions[items_[k]] - p);
                    if (d < best_d) {
                        best_d = d;
                        best = items_[k];
                    }
                }
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Near-critical scan

std::vector<ScanRow> near_critical_scan(const IsoradialGraph& g, const std::vector<double>& beta_grid,
                                        std::size_t samples, const RunOptions& options) {
    std::vector<EdgeWeights> weights;
    for (double beta : beta_grid) weights.push_back(percolation_weights(g, beta));
    const double L = patch_scale(g);
    const double reach = L / 4;
    const auto vertices = measurement_vertices(g, reach);
    const Bounds b = graph_bounds(g);
    const CrossingSpec central{{(b.lo + b.hi) * 0.5, L / 2, L / 2, 0.0}, CrossingDirection::Horizontal};
    const BoxCrossing crossing(g, central);
    const double nv = static_cast<double>(g.vertex_count());

    const std::size_t nb = beta_grid.size();
    std::vector<std::vector<std::array<double, 5>>> per(nb, std::vector<std::array<double, 5>>(samples));
    for_each_replica(samples, options.threads, [&](std::size_t s) {
        Rng rng(options.seed, s);
        std::vector<double> u(g.edge_count());
        for (double& x : u) x = rng.uniform();
        std::vector<std::uint8_t> open(u.size());
        for (std::size_t k = 0; k < nb; ++k) {
            for (std::size_t e = 0; e < u.size(); ++e) open[e] = u[e] < weights[k].p[e];
            const auto d = cluster_decomposition(g, open);
            double reached = 0, finite = 0;
            for (VertexId v : vertices) {
                if (cluster_radius(g, d, v) >= reach - 1e-9) reached += 1;
                else finite += d.size[d.label[v]];
            }
            const double m = static_cast<double>(vertices.size());
            per[k][s] = {reached / m, finite / m, d.largest() / nv, crossing.crosses_graph(open) ? 1.0 : 0.0,
                         static_cast<double>(d.count()) / nv};
        }
    });

    std::vector<ScanRow> rows;
    for (std::size_t k = 0; k < nb; ++k) {
        ScanRow r;
        r.beta = beta_grid[k];
        std::array<std::vector<double>, 5> cols;
        for (const auto& a : per[k])
            for (int j = 0; j < 5; ++j) cols[j].push_back(a[j]);
        r.theta = summarize(cols[0]);
        r.chi_finite = summarize(cols[1]);
        r.largest_fraction = summarize(cols[2]);
        r.spanning = summarize(cols[3]);
        r.clusters_per_vertex = summarize(cols[4]);
        rows.push_back(r);
    }
    return rows;
}

} // namespace isoperc
