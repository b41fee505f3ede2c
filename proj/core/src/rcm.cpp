#include "isoperc/rcm.hpp"

#include "isoperc/error.hpp"
#include "isoperc/parallel.hpp"
#include "isoperc/serialize.hpp"
#include "isoperc/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isoperc {

namespace {

// Ghost node of each vertex (kNoId when the vertex is not merged), and the
// number of ghosts.
std::pair<std::vector<std::uint32_t>, std::size_t> ghosts(const IsoradialGraph& g, const BoundaryCondition& b) {
    std::vector<std::uint32_t> ghost(g.vertex_count(), kNoId);
    const auto n = static_cast<std::uint32_t>(g.vertex_count());
    switch (b.kind) {
    case BoundaryKind::Free: return {ghost, 0};
    case BoundaryKind::Wired:
        for (VertexId v : g.boundary) ghost[v] = n;
        return {ghost, g.boundary.empty() ? 0 : 1};
    case BoundaryKind::Explicit:
        for (std::size_t k = 0; k < b.blocks.size(); ++k)
            for (VertexId v : b.blocks[k]) ghost[v] = n + static_cast<std::uint32_t>(k);
        return {ghost, b.blocks.size()};
    }
    return {ghost, 0};
}

void validate_boundary(const IsoradialGraph& g, const BoundaryCondition& b) {
    if (b.kind != BoundaryKind::Explicit) return;
    std::vector<int> seen(g.vertex_count(), 0);
    for (const auto& block : b.blocks) {
        if (block.empty()) throw Error(ErrorKind::Validation, "empty boundary block");
        for (VertexId v : block) {
            if (v >= g.vertex_count() || !g.is_boundary(v))
                throw Error(ErrorKind::Validation, "partition holds a non-boundary vertex");
            if (seen[v]++) throw Error(ErrorKind::Validation, "boundary vertex appears in two blocks");
        }
    }
    for (VertexId v : g.boundary)
        if (!seen[v]) throw Error(ErrorKind::Validation, "partition misses a boundary vertex");
}

void validate_params(const RCParams& params, std::size_t edge_count) {
    if (!(params.q >= 1.0)) throw Error(ErrorKind::UnsupportedParameter, "q must be at least 1");
    if (params.p.size() != edge_count) throw Error(ErrorKind::Shape, "parameters do not match the graph");
    for (double p : params.p)
        if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidParameter, "edge probabilities must lie in (0, 1)");
}

std::string params_id(const RCParams& params) {
    ContentHasher h;
    h.text("rc");
    h.value(params.q);
    h.value(params.beta);
    for (double p : params.p) h.value(p);
    return h.hex();
}

} // namespace

RCParams RCParams::from_weights(const EdgeWeights& weights) {
    if (weights.model != Model::RandomCluster || !weights.q)
        throw Error(ErrorKind::WrongModel, "random-cluster parameters need random-cluster weights");
    return {*weights.q, weights.beta, weights.p};
}

RCParams RCParams::uniform(std::size_t edge_count, double p, double q) {
    return {q, 1.0, std::vector<double>(edge_count, p)};
}

void validate_rc(const IsoradialGraph& g, const RCParams& params, const BoundaryCondition& b) {
    validate_params(params, g.edge_count());
    validate_boundary(g, b);
}

std::size_t boundary_cluster_count(const IsoradialGraph& g, const std::vector<std::uint8_t>& open,
                                   const BoundaryCondition& b) {
    if (open.size() != g.edge_count()) throw Error(ErrorKind::Shape, "configuration does not match the graph");
    const auto [ghost, extra] = ghosts(g, b);
    DisjointSets ds(g.vertex_count() + extra);
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (ghost[v] != kNoId) ds.unite(v, ghost[v]);
    for (EdgeId e = 0; e < open.size(); ++e)
        if (open[e]) ds.unite(g.edges[e].u, g.edges[e].v);
    return ds.components();
}

double rc_log_weight(const IsoradialGraph& g, const std::vector<std::uint8_t>& open, const RCParams& params,
                     const BoundaryCondition& b) {
    validate_params(params, g.edge_count());
    double w = 0;
    for (EdgeId e = 0; e < open.size(); ++e) w += open[e] ? std::log(params.p[e]) : std::log1p(-params.p[e]);
    return w + static_cast<double>(boundary_cluster_count(g, open, b)) * std::log(params.q);
}

std::vector<std::uint8_t> config_from_index(std::uint64_t index, std::size_t edge_count) {
    std::vector<std::uint8_t> open(edge_count);
    for (std::size_t e = 0; e < edge_count; ++e) open[e] = (index >> e) & 1U;
    return open;
}

std::uint64_t config_index(const std::vector<std::uint8_t>& open) {
    std::uint64_t index = 0;
    for (std::size_t e = 0; e < open.size(); ++e)
        if (open[e]) index |= std::uint64_t{1} << e;
    return index;
}

std::vector<double> exact_rc_distribution(const IsoradialGraph& g, const RCParams& params,
                                          const BoundaryCondition& b) {
    validate_rc(g, params, b);
    const std::size_t m = g.edge_count();
    if (m > 24) throw Error(ErrorKind::Size, "enumeration is limited to 24 edges");
    const auto [ghost, extra] = ghosts(g, b);
    const double log_q = std::log(params.q);
    std::vector<double> lw(std::size_t{1} << m);
    DisjointSets ds;
    for (std::uint64_t s = 0; s < lw.size(); ++s) {
        ds.reset(g.vertex_count() + extra);
        for (VertexId v = 0; v < g.vertex_count(); ++v)
            if (ghost[v] != kNoId) ds.unite(v, ghost[v]);
        double w = 0;
        for (EdgeId e = 0; e < m; ++e) {
            if ((s >> e) & 1U) {
                w += std::log(params.p[e]);
                ds.unite(g.edges[e].u, g.edges[e].v);
            } else {
                w += std::log1p(-params.p[e]);
            }
        }
        lw[s] = w + static_cast<double>(ds.components()) * log_q;
    }
    const double top = *std::max_element(lw.begin(), lw.end());
    double z = 0;
    for (double& w : lw) z += (w = std::exp(w - top));
    for (double& w : lw) w /= z;
    return lw;
}

// ---------------------------------------------------------------------------
// Heat bath

HeatBath::HeatBath(const IsoradialGraph& g, RCParams params, BoundaryCondition b, Connectivity method)
    : g_(&g), params_(std::move(params)), method_(method) {
    validate_rc(g, params_, b);
    p_free_.resize(params_.p.size());
    for (std::size_t e = 0; e < p_free_.size(); ++e) {
        const double p = params_.p[e];
        p_free_[e] = p / (p + (1 - p) * params_.q);
    }
    open_.assign(g.edge_count(), 0);

    const auto [ghost, extra] = ghosts(g, b);
    const std::size_t n = g.vertex_count();
    nodes_ = n + extra;
    std::vector<std::uint32_t> count(nodes_ + 1, 0);
    for (VertexId v = 0; v < n; ++v) {
        count[v + 1] += static_cast<std::uint32_t>(g.degree(v));
        if (ghost[v] != kNoId) {
            ++count[v + 1];
            ++count[ghost[v] + 1];
        }
    }
    for (std::size_t i = 0; i < nodes_; ++i) count[i + 1] += count[i];
    offset_ = count;
    target_.resize(offset_.back());
    via_.resize(offset_.back());
    std::vector<std::uint32_t> fill(offset_.begin(), offset_.end() - 1);
    for (VertexId v = 0; v < n; ++v) {
        const auto nb = g.neighbours(v);
        const auto ed = g.incident_edges(v);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            target_[fill[v]] = nb[k];
            via_[fill[v]++] = ed[k];
        }
        if (ghost[v] != kNoId) {
            target_[fill[v]] = ghost[v];
            via_[fill[v]++] = kNoId;
            target_[fill[ghost[v]]] = v;
            via_[fill[ghost[v]]++] = kNoId;
        }
    }
    mark_.assign(nodes_, 0);
}

void HeatBath::set_state(std::vector<std::uint8_t> open) {
    if (open.size() != open_.size()) throw Error(ErrorKind::Shape, "configuration does not match the graph");
    open_ = std::move(open);
}

void HeatBath::fill(bool open) { std::fill(open_.begin(), open_.end(), std::uint8_t{open}); }

bool HeatBath::connected_off(EdgeId e) { return method_ == Connectivity::Search ? search(e) : union_find(e); }

bool HeatBath::search(EdgeId e) {
    const VertexId a = g_->edges[e].u, b = g_->edges[e].v;
    if (a == b) return true;
    if (++stamp_ >= (1U << 31)) {
        std::fill(mark_.begin(), mark_.end(), 0);
        stamp_ = 1;
    }
    const std::uint32_t base = stamp_ << 1;
    std::size_t head[2] = {0, 0};
    queue_[0].assign(1, a);
    queue_[1].assign(1, b);
    mark_[a] = base;
    mark_[b] = base | 1;
    for (;;) {
        for (std::uint32_t side = 0; side < 2; ++side) {
            auto& q = queue_[side];
            if (head[side] == q.size()) return false;
            const std::uint32_t x = q[head[side]++];
            for (std::uint32_t k = offset_[x]; k < offset_[x + 1]; ++k) {
                const EdgeId via = via_[k];
                if (via != kNoId && (via == e || !open_[via])) continue;
                const std::uint32_t t = target_[k];
                const std::uint32_t m = mark_[t];
                if ((m >> 1) == stamp_) {
                    if ((m & 1) != side) return true;
                    continue;
                }
                mark_[t] = base | side;
                q.push_back(t);
            }
        }
    }
}

bool HeatBath::union_find(EdgeId e) {
    DisjointSets ds(nodes_);
    for (std::uint32_t x = 0; x < nodes_; ++x)
        for (std::uint32_t k = offset_[x]; k < offset_[x + 1]; ++k) {
            const EdgeId via = via_[k];
            if (via == kNoId || (via != e && open_[via])) ds.unite(x, target_[k]);
        }
    return ds.same(g_->edges[e].u, g_->edges[e].v);
}

double HeatBath::open_probability(EdgeId e) { return connected_off(e) ? params_.p[e] : p_free_[e]; }

void HeatBath::update(EdgeId e, double u) {
    // the connectivity question only matters between the two conditional laws
    if (u < p_free_[e]) open_[e] = 1;
    else if (u >= params_.p[e]) open_[e] = 0;
    else open_[e] = connected_off(e) ? 1 : 0;
}

void HeatBath::sweep(Rng& rng) {
    for (EdgeId e = 0; e < open_.size(); ++e) update(e, rng.uniform());
}

Configuration rc_heat_bath_sample(const IsoradialGraph& g, const RCParams& params, const BoundaryCondition& b,
                                  std::size_t sweeps, Rng& rng, ChainStart start) {
    HeatBath chain(g, params, b);
    chain.fill(start == ChainStart::Open);
    for (std::size_t s = 0; s < sweeps; ++s) chain.sweep(rng);
    Configuration c;
    c.open = chain.state();
    c.graph_id = content_hash(g);
    c.weights_id = params_id(params);
    return c;
}

std::vector<double> apply_heat_bath_update(HeatBath& chain, EdgeId e, const std::vector<double>& dist) {
    const std::size_t m = chain.state().size();
    if (dist.size() != (std::size_t{1} << m)) throw Error(ErrorKind::Shape, "distribution does not match the chain");
    const std::uint64_t bit = std::uint64_t{1} << e;
    std::vector<double> out(dist.size(), 0.0);
    for (std::uint64_t s = 0; s < dist.size(); ++s) {
        if (dist[s] == 0) continue;
        chain.set_state(config_from_index(s, m));
        const double p = chain.open_probability(e);
        out[s | bit] += dist[s] * p;
        out[s & ~bit] += dist[s] * (1 - p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scans

double steepest_rise(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::Size, "need at least two points");
    const std::size_t n = x.size() - 1;
    std::vector<double> mid(n), slope(n);
    for (std::size_t i = 0; i < n; ++i) {
        mid[i] = (x[i] + x[i + 1]) / 2;
        slope[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    }
    const auto k = static_cast<std::size_t>(std::max_element(slope.begin(), slope.end()) - slope.begin());
    if (k == 0 || k + 1 == n) return mid[k];
    // vertex of the parabola through the three slopes around the maximum
    const double x0 = mid[k - 1], x1 = mid[k], x2 = mid[k + 1];
    const double s0 = slope[k - 1], s1 = slope[k], s2 = slope[k + 1];
    const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (s1 - s0) + x1 * (s0 - s2) + x0 * (s2 - s1)) / d;
    const double b = (x2 * x2 * (s0 - s1) + x1 * x1 * (s2 - s0) + x0 * x0 * (s1 - s2)) / d;
    if (!(a < 0)) return x1;
    return std::clamp(-b / (2 * a), x0, x2);
}

RcScan rc_crossing_scan(const IsoradialGraph& g, double q, const std::vector<double>& p_grid,
                        const BoundaryCondition& b, const CrossingSpec& spec, std::size_t replicas,
                        const ChainOptions& chain, const RunOptions& options) {
    if (!(q >= 1.0)) throw Error(ErrorKind::UnsupportedParameter, "q must be at least 1");
    if (g.mask && !g.mask->contains_box(spec.box, kBoundaryMargin))
        throw Error(ErrorKind::Geometry, "crossing box is too close to the patch boundary");
    if (replicas == 0) throw Error(ErrorKind::InvalidParameter, "need at least one replica");
    for (double p : p_grid) validate_rc(g, RCParams::uniform(g.edge_count(), p, q), b);
    const BoxCrossing box(g, spec);
    const std::size_t np = p_grid.size();

    // hits[start][p][replica]
    std::vector<std::vector<std::vector<double>>> hits(2, std::vector<std::vector<double>>(np, std::vector<double>(replicas)));
    for_each_replica(replicas, options.threads, [&](std::size_t r) {
        for (std::size_t i = 0; i < np; ++i) {
            for (int start = 0; start < 2; ++start) {
                HeatBath hb(g, RCParams::uniform(g.edge_count(), p_grid[i], q), b);
                hb.fill(start == 0);
                Rng rng(options.seed, r);
                for (std::size_t s = 0; s < chain.burn_in; ++s) hb.sweep(rng);
                std::size_t crossed = 0;
                for (std::size_t m = 0; m < chain.measurements; ++m) {
                    for (std::size_t s = 0; s < chain.spacing; ++s) hb.sweep(rng);
                    crossed += box.crosses_graph(hb.state());
                }
                hits[start][i][r] = static_cast<double>(crossed) / static_cast<double>(std::max<std::size_t>(chain.measurements, 1));
            }
        }
    });

    RcScan scan;
    scan.sweeps_per_chain = chain.burn_in + chain.measurements * chain.spacing;
    std::vector<double> values;
    for (std::size_t i = 0; i < np; ++i) {
        RcScanRow row;
        row.p = p_grid[i];
        row.open_start = summarize(hits[0][i]);
        row.closed_start = summarize(hits[1][i]);
        std::vector<double> pooled(replicas);
        for (std::size_t r = 0; r < replicas; ++r) pooled[r] = (hits[0][i][r] + hits[1][i][r]) / 2;
        row.crossing = summarize(pooled);
        const double diff = std::abs(row.open_start.value - row.closed_start.value);
        const double se = std::hypot(row.open_start.std_error, row.closed_start.std_error);
        row.start_gap = diff == 0 ? 0.0 : (se > 0 ? diff / se : std::numeric_limits<double>::infinity());
        scan.max_start_gap = std::max(scan.max_start_gap, row.start_gap);
        values.push_back(row.crossing.value);
        scan.rows.push_back(row);
    }
    scan.monotone = true;
    for (std::size_t i = 1; i < np; ++i)
        if (values[i] < values[i - 1] - 1e-12 || p_grid[i] <= p_grid[i - 1]) scan.monotone = false;
    if (np >= 2) scan.steepest_rise = steepest_rise(p_grid, values);
    return scan;
}

double critical_surface_residual(double p1, double p2, double q) {
    if (!(p1 > 0 && p1 < 1 && p2 > 0 && p2 < 1)) throw Error(ErrorKind::InvalidParameter, "p must lie in (0, 1)");
    if (!(q >= 1.0)) throw Error(ErrorKind::UnsupportedParameter, "q must be at least 1");
    return p1 / (1 - p1) * (p2 / (1 - p2)) - q;
}

double rc_critical_p(double q) {
    if (!(q >= 1.0)) throw Error(ErrorKind::UnsupportedParameter, "q must be at least 1");
    return std::sqrt(q) / (1 + std::sqrt(q));
}

RcDecay rc_two_point_decay(const IsoradialGraph& g, double q, double beta, const std::vector<double>& distances,
                           std::size_t replicas, const ChainOptions& chain, const RunOptions& options,
                           bool enforce_regime, Vec2 direction) {
    if (enforce_regime && !(beta < 1.0)) throw Error(ErrorKind::OutOfRegime, "decay is only asserted below beta = 1");
    if (enforce_regime && !(q >= 4.0)) throw Error(ErrorKind::OutOfRegime, "decay is only asserted for q >= 4");
    if (replicas == 0 || chain.measurements == 0) throw Error(ErrorKind::InvalidParameter, "nothing to measure");
    if (norm(direction) == 0) throw Error(ErrorKind::InvalidParameter, "direction must be nonzero");
    direction = direction / norm(direction);
    const RCParams params = RCParams::from_weights(rc_weights(g, q, beta));
    const BoundaryCondition free = BoundaryCondition::free();
    validate_rc(g, params, free);

    const VertexLocator locate(g);
    std::vector<std::vector<std::pair<VertexId, VertexId>>> pairs(distances.size());
    for (std::size_t k = 0; k < distances.size(); ++k) {
        for (VertexId v : interior_vertices(g, distances[k] + kBoundaryMargin)) {
            const auto w = locate.nearest(g.positions[v] + direction * distances[k]);
            if (w) pairs[k].emplace_back(v, *w);
        }
        if (pairs[k].empty()) throw Error(ErrorKind::Geometry, "no vertex is far enough inside the patch");
    }

    std::vector<std::vector<double>> values(distances.size(), std::vector<double>(replicas));
    for_each_replica(replicas, options.threads, [&](std::size_t r) {
        HeatBath hb(g, params, free);
        Rng rng(options.seed, r);
        for (std::size_t s = 0; s < chain.burn_in; ++s) hb.sweep(rng);
        std::vector<double> acc(distances.size(), 0.0);
        for (std::size_t m = 0; m < chain.measurements; ++m) {
            for (std::size_t s = 0; s < chain.spacing; ++s) hb.sweep(rng);
            const auto d = cluster_decomposition(g, hb.state());
            for (std::size_t k = 0; k < distances.size(); ++k) {
                std::size_t hit = 0;
                for (const auto& [v, w] : pairs[k]) hit += d.label[v] == d.label[w];
                acc[k] += static_cast<double>(hit) / static_cast<double>(pairs[k].size());
            }
        }
        for (std::size_t k = 0; k < distances.size(); ++k)
            values[k][r] = acc[k] / static_cast<double>(chain.measurements);
    });

    RcDecay out;
    out.curve.abscissa = distances;
    for (const auto& v : values) {
        const auto e = summarize(v);
        out.curve.estimate.push_back(e.value);
        out.curve.std_error.push_back(e.std_error);
        out.curve.samples.push_back(e.samples);
        out.curve.batch_means.push_back(batch_means(v, options.batches));
    }

    const FitWindow window = resolved_window(out.curve);
    const FitOptions fo{1000, options.seed, 0.95};
    out.exponential = fit_exponential(out.curve, window, fo);
    out.power = fit_power_law(out.curve, window, fo);
    out.exponential_preferred = out.exponential.residual_norm < out.power.residual_norm;
    return out;
}

} // namespace isoperc
