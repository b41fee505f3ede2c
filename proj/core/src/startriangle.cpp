#include "isoperc/startriangle.hpp"

#include "isoperc/error.hpp"
#include <bit>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace isoperc {

namespace {

constexpr double kPi = std::numbers::pi;

int partition_from_links(bool ab, bool ac, bool bc) {
    if (ab && ac) return 4;  // connectivity is transitive, so any two links join all three
    if ((ab && bc) || (ac && bc)) return 4;
    if (ab) return 1;
    if (ac) return 2;
    if (bc) return 3;
    return 0;
}

int component_count(Shape shape, unsigned bits) {
    if (shape == Shape::Triangle) {
        const int open = std::popcount(bits & 7u);
        return open == 0 ? 3 : open == 1 ? 2 : 1;
    }
    return 4 - std::popcount(bits & 7u);  // each open arm joins a leaf to O
}

std::array<double, 3> shape_values(Shape shape, const TriangleParams& params) {
    std::array<double, 3> v = params.values;
    if (shape == Shape::Star) {
        for (double& x : v) x = params.model == Model::Percolation ? 1 - x : params.q / x;
    }
    return v;
}

} // namespace

TriangleParams TriangleParams::percolation(double p0, double p1, double p2) {
    for (double p : {p0, p1, p2})
        if (!(p >= 0 && p < 1)) throw Error(ErrorKind::InvalidParameter, "triangle probabilities must lie in [0, 1)");
    return {Model::Percolation, {p0, p1, p2}, 1.0};
}

TriangleParams TriangleParams::random_cluster(double y0, double y1, double y2, double q) {
    rc_sigma(q);
    for (double y : {y0, y1, y2})
        if (!(y > 0) || !std::isfinite(y)) throw Error(ErrorKind::InvalidParameter, "triangle ratios must be positive");
    return {Model::RandomCluster, {y0, y1, y2}, q};
}

TriangleParams TriangleParams::canonical_percolation(const std::array<double, 3>& theta) {
    return percolation(canonical_percolation_p(theta[0]), canonical_percolation_p(theta[1]),
                       canonical_percolation_p(theta[2]));
}

TriangleParams TriangleParams::canonical_random_cluster(const std::array<double, 3>& theta, double q) {
    return random_cluster(canonical_rc_y(theta[0], q), canonical_rc_y(theta[1], q), canonical_rc_y(theta[2], q), q);
}

int triangle_partition(unsigned bits) {
    return partition_from_links((bits & 4u) != 0, (bits & 2u) != 0, (bits & 1u) != 0);
}

int star_partition(unsigned bits) {
    const bool a = bits & 1u, b = bits & 2u, c = bits & 4u;
    return partition_from_links(a && b, a && c, b && c);
}

double kappa(double p0, double p1, double p2) { return p0 + p1 + p2 - p0 * p1 * p2 - 1; }

double psi(double y0, double y1, double y2, double q) { return y0 * y1 * y2 + y0 * y1 + y1 * y2 + y2 * y0 - q; }

double solvability_residual(const TriangleParams& params) {
    const auto& v = params.values;
    return params.model == Model::Percolation ? kappa(v[0], v[1], v[2]) : psi(v[0], v[1], v[2], params.q);
}

std::array<double, 8> configuration_law(Shape shape, const TriangleParams& params) {
    const auto v = shape_values(shape, params);
    std::array<double, 8> w{};
    double total = 0.0;
    for (unsigned bits = 0; bits < 8; ++bits) {
        double weight = 1.0;
        for (int i = 0; i < 3; ++i) {
            const bool open = bits >> i & 1u;
            if (params.model == Model::Percolation) weight *= open ? v[i] : 1 - v[i];
            else if (open) weight *= v[i];
        }
        if (params.model == Model::RandomCluster) weight *= std::pow(params.q, component_count(shape, bits));
        w[bits] = weight;
        total += weight;
    }
    for (double& x : w) x /= total;
    return w;
}

PartitionLaw partition_law(Shape shape, const TriangleParams& params) {
    const auto w = configuration_law(shape, params);
    PartitionLaw law{};
    for (unsigned bits = 0; bits < 8; ++bits)
        law[shape == Shape::Triangle ? triangle_partition(bits) : star_partition(bits)] += w[bits];
    return law;
}

EquivalenceReport verify_equivalence(const TriangleParams& params, double tolerance) {
    EquivalenceReport r;
    r.residual = solvability_residual(params);
    r.law_triangle = partition_law(Shape::Triangle, params);
    r.law_star = partition_law(Shape::Star, params);
    for (int i = 0; i < 5; ++i) r.max_abs_diff = std::max(r.max_abs_diff, std::abs(r.law_triangle[i] - r.law_star[i]));
    r.pass = r.max_abs_diff <= tolerance;
    r.consistent = r.pass == (std::abs(r.residual) <= 1e-9);
    return r;
}

CouplingKernel::CouplingKernel(const TriangleParams& params, Direction direction) : direction_(direction) {
    if (params.model != Model::Percolation)
        throw Error(ErrorKind::WrongModel, "configuration coupling exists for percolation only");
    const double residual = solvability_residual(params);
    if (std::abs(residual) > 1e-9)
        throw Error(ErrorKind::NotSolvable, "kappa = " + std::to_string(residual) + " is not zero");

    const Shape source = direction == Direction::TriangleToStar ? Shape::Triangle : Shape::Star;
    const Shape target = direction == Direction::TriangleToStar ? Shape::Star : Shape::Triangle;
    auto part = [](Shape s, unsigned bits) { return s == Shape::Triangle ? triangle_partition(bits) : star_partition(bits); };
    const auto source_law = configuration_law(source, params);
    const auto target_law = configuration_law(target, params);
    PartitionLaw target_classes{};
    for (unsigned t = 0; t < 8; ++t) target_classes[part(target, t)] += target_law[t];

    for (unsigned s = 0; s < 8; ++s) {
        const int cls = part(source, s);
        int support = 0;
        if (target_classes[cls] > 0) {
            for (unsigned t = 0; t < 8; ++t) {
                if (part(target, t) != cls) continue;
                k_[s][t] = target_law[t] / target_classes[cls];
                if (k_[s][t] > 0) ++support;
            }
        } else {
            // unreachable class under the target law: first configuration with that partition
            for (unsigned t = 0; t < 8; ++t) {
                if (part(target, t) == cls) {
                    k_[s][t] = 1.0;
                    support = 1;
                    break;
                }
            }
        }
        random_[s] = support > 1;
    }

    // enumeration check: partition kept pointwise, source law pushed onto target law
    std::array<double, 8> pushed{};
    for (unsigned s = 0; s < 8; ++s) {
        double row = 0.0;
        for (unsigned t = 0; t < 8; ++t) {
            if (k_[s][t] != 0 && part(target, t) != part(source, s))
                throw Error(ErrorKind::NotSolvable, "coupling kernel breaks a partition");
            row += k_[s][t];
            pushed[t] += source_law[s] * k_[s][t];
        }
        if (std::abs(row - 1) > 1e-12) throw Error(ErrorKind::NotSolvable, "coupling kernel row is not stochastic");
    }
    for (unsigned t = 0; t < 8; ++t) residual_ = std::max(residual_, std::abs(pushed[t] - target_law[t]));
    if (residual_ > 1e-10)
        throw Error(ErrorKind::NotSolvable, "coupling kernel fails its push-forward check");
}

unsigned CouplingKernel::sample(unsigned from, Rng& rng) const {
    const auto& row = k_.at(from);
    if (!random_[from]) {
        for (unsigned t = 0; t < 8; ++t)
            if (row[t] > 0) return t;
    }
    const double u = rng.uniform();
    double acc = 0.0;
    unsigned last = 0;
    for (unsigned t = 0; t < 8; ++t) {
        if (row[t] <= 0) continue;
        acc += row[t];
        last = t;
        if (u < acc) return t;
    }
    return last;
}

unsigned couple_triangle_star(unsigned bits, Direction direction, const TriangleParams& params, Rng& rng) {
    if (bits > 7) throw Error(ErrorKind::InvalidParameter, "configuration has three bits");
    return CouplingKernel(params, direction).sample(bits, rng);
}

SwitchResult apply_switch(const IsoradialGraph& g, const EdgeWeights& weights,
                          const std::vector<std::uint8_t>& open, VertexId center, Rng& rng) {
    if (!g.tiling) throw Error(ErrorKind::MissingSource, "graph has no source tiling");
    if (weights.model != Model::Percolation || std::abs(weights.beta - 1) > 1e-12)
        throw Error(ErrorKind::InvalidParameter, "switches need canonical percolation weights");
    if (open.size() != g.edge_count() || weights.p.size() != g.edge_count())
        throw Error(ErrorKind::Shape, "configuration does not match the graph");
    const RhombicTiling& t = *g.tiling;
    if (!is_flippable(t, center))
        throw Error(ErrorKind::NotFlippable, "vertex " + std::to_string(center) + " is not a hexagon centre");

    std::vector<EdgeId> edge_of(t.size(), kNoId);
    for (EdgeId e = 0; e < g.edge_count(); ++e) edge_of[g.edge_rhombus[e]] = e;

    // label each hexagon rhombus by the spoke it does not use
    const Vec2 c = t.vertices()[center];
    const auto around = t.incident(center);
    std::vector<Vec2> spokes;
    std::array<std::array<int, 2>, 3> pairs{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& cs = t.corners(around[i]);
        const auto k = std::find(cs.begin(), cs.end(), center) - cs.begin();
        for (int side = 0; side < 2; ++side) {
            const Vec2 u = t.vertices()[cs[(k + (side == 0 ? 1 : 3)) % 4]] - c;
            auto it = std::find_if(spokes.begin(), spokes.end(), [&](Vec2 s) { return norm(s - u) < 1e-6; });
            if (it == spokes.end()) {
                spokes.push_back(u);
                it = spokes.end() - 1;
            }
            pairs[i][side] = static_cast<int>(it - spokes.begin());
        }
    }
    std::array<EdgeId, 3> edge_at{};
    for (std::size_t i = 0; i < 3; ++i) edge_at[3 - pairs[i][0] - pairs[i][1]] = edge_of[around[i]];

    const bool star = t.colour(center) == g.colour_class;
    const Direction direction = star ? Direction::StarToTriangle : Direction::TriangleToStar;
    std::array<double, 3> p{};
    unsigned bits = 0;
    for (int k = 0; k < 3; ++k) {
        p[k] = star ? 1 - weights.p[edge_at[k]] : weights.p[edge_at[k]];
        if (open[edge_at[k]]) bits |= 1u << k;
    }
    const CouplingKernel kernel(TriangleParams::percolation(p[0], p[1], p[2]), direction);
    const unsigned coupled = kernel.sample(bits, rng);

    auto flipped = std::make_shared<const RhombicTiling>(hexagon_flip(t, center));
    SwitchResult out;
    out.direction = direction;
    out.graph = build_isoradial(std::move(flipped), g.colour_class);
    out.weights = percolation_weights(out.graph, 1.0);
    out.open.assign(out.graph.edge_count(), 0);
    std::vector<EdgeId> new_edge_of(out.graph.tiling->size(), kNoId);
    for (EdgeId e = 0; e < out.graph.edge_count(); ++e) new_edge_of[out.graph.edge_rhombus[e]] = e;
    for (EdgeId e = 0; e < g.edge_count(); ++e) out.open[new_edge_of[g.edge_rhombus[e]]] = open[e];
    for (int k = 0; k < 3; ++k)
        out.open[new_edge_of[g.edge_rhombus[edge_at[k]]]] = static_cast<std::uint8_t>(coupled >> k & 1u);
    return out;
}

} // namespace isoperc
