#include "doctest.h"

#include "isoperc/error.hpp"
#include "isoperc/rcm.hpp"
#include "isoperc/startriangle.hpp"
#include "isoperc/union_find.hpp"
#include "small_graphs.hpp"

#include <cmath>

using namespace isoperc;
using isoperc::testing::grid_graph;
using isoperc::testing::small_graphs;

namespace {

const std::vector<BoundaryCondition>& conditions() {
    static const std::vector<BoundaryCondition> b{BoundaryCondition::free(), BoundaryCondition::wired()};
    return b;
}

PartitionLaw induced_law(const IsoradialGraph& g, const std::vector<double>& dist) {
    PartitionLaw law{};
    for (std::uint64_t s = 0; s < dist.size(); ++s) {
        DisjointSets ds(g.vertex_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            if ((s >> e) & 1U) ds.unite(g.edges[e].u, g.edges[e].v);
        const bool ab = ds.same(0, 1), ac = ds.same(0, 2), bc = ds.same(1, 2);
        const int cls = ab && ac ? 4 : ab ? 1 : ac ? 2 : bc ? 3 : 0;
        law[cls] += dist[s];
    }
    return law;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    double tv = 0;
    for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
    return tv / 2;
}

} // namespace

TEST_CASE("configuration weights") {
    const auto edge = make_graph({{0, 0}, {1, 0}}, {{0, 1}});
    const auto params = RCParams::uniform(1, 0.5, 2.0);
    const double ratio = std::exp(rc_log_weight(edge, {1}, params, {}) - rc_log_weight(edge, {0}, params, {}));
    CHECK(ratio == doctest::Approx(0.5 / (0.5 * 2)).epsilon(1e-14));
    const auto d = exact_rc_distribution(edge, params, {});
    CHECK(d[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(d[0] == doctest::Approx(2.0 / 3).epsilon(1e-14));

    // a - b - c with both ends on the boundary
    const auto path = make_graph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {}, {0, 2});
    const auto wired = BoundaryCondition::wired();
    CHECK(boundary_cluster_count(path, {0, 0}, {}) == 3);
    CHECK(boundary_cluster_count(path, {0, 0}, wired) == 2);
    CHECK(boundary_cluster_count(path, {1, 0}, {}) == 2);
    CHECK(boundary_cluster_count(path, {1, 0}, wired) == 1);
    CHECK(boundary_cluster_count(path, {1, 1}, wired) == 1);
    CHECK(boundary_cluster_count(path, {1, 1}, BoundaryCondition::partition({{0}, {2}})) == 1);
    CHECK(boundary_cluster_count(path, {0, 0}, BoundaryCondition::partition({{0}, {2}})) == 3);
}

TEST_CASE("parameter and boundary validation") {
    const auto path = make_graph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {}, {0, 2});
    auto kind_of = [&](const RCParams& p, const BoundaryCondition& b) {
        try {
            validate_rc(path, p, b);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Format;  // sentinel: no error
    };
    CHECK(kind_of(RCParams::uniform(2, 0.5, 0.5), {}) == ErrorKind::UnsupportedParameter);
    CHECK(kind_of(RCParams::uniform(2, 1.0, 2.0), {}) == ErrorKind::InvalidParameter);
    CHECK(kind_of(RCParams::uniform(3, 0.5, 2.0), {}) == ErrorKind::Shape);
    CHECK(kind_of(RCParams::uniform(2, 0.5, 2.0), BoundaryCondition::partition({{0}})) == ErrorKind::Validation);
    CHECK(kind_of(RCParams::uniform(2, 0.5, 2.0), BoundaryCondition::partition({{0, 1}, {2}})) ==
          ErrorKind::Validation);
    CHECK(kind_of(RCParams::uniform(2, 0.5, 2.0), BoundaryCondition::partition({{0, 2}, {2}})) ==
          ErrorKind::Validation);
    CHECK(kind_of(RCParams::uniform(2, 0.5, 2.0), BoundaryCondition::partition({{2, 0}})) == ErrorKind::Format);
    CHECK_THROWS_AS(exact_rc_distribution(grid_graph(4, 5), RCParams::uniform(31, 0.5, 2), {}), Error);
    CHECK_THROWS_AS(RCParams::from_weights(uniform_percolation_weights(3, 0.5)), Error);
}

TEST_CASE("exact distribution") {
    for (const auto& [name, g] : small_graphs()) {
        CAPTURE(name);
        const auto prod = exact_rc_distribution(g, RCParams::uniform(g.edge_count(), 0.3, 1.0), {});
        double total = 0;
        for (std::uint64_t s = 0; s < prod.size(); ++s) {
            const auto k = static_cast<int>(config_index(config_from_index(s, g.edge_count())) == s);
            CHECK(k == 1);
            int open = 0;
            for (std::size_t e = 0; e < g.edge_count(); ++e) open += (s >> e) & 1U;
            const double product = std::pow(0.3, open) * std::pow(0.7, static_cast<double>(g.edge_count()) - open);
            CHECK(std::abs(prod[s] - product) <= 1e-14);
            total += prod[s];
        }
        CHECK(std::abs(total - 1) <= 1e-12);
        for (double q : {2.0, 9.0})
            for (const auto& b : conditions()) {
                double sum = 0;
                for (double v : exact_rc_distribution(g, RCParams::uniform(g.edge_count(), 0.6, q), b)) sum += v;
                CHECK(std::abs(sum - 1) <= 1e-12);
            }
    }

    // two enumeration routes for the triangle and star laws
    const auto graphs = small_graphs();
    const auto& tri = graphs[2].graph;
    const auto& star = graphs[3].graph;
    const auto tri_law = induced_law(tri, exact_rc_distribution(tri, RCParams::uniform(3, 0.5, 4.0), {}));
    const auto star_law = induced_law(star, exact_rc_distribution(star, RCParams::uniform(3, 0.8, 4.0), {}));
    const auto ref = partition_law(Shape::Triangle, TriangleParams::random_cluster(1, 1, 1, 4));
    const PartitionLaw expected{0.5, 0.125, 0.125, 0.125, 0.125};
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(tri_law[k] - ref[k]) <= 1e-12);
        CHECK(std::abs(tri_law[k] - expected[k]) <= 1e-12);
        CHECK(std::abs(star_law[k] - expected[k]) <= 1e-12);
    }
}

TEST_CASE("connectivity search agrees with union-find") {
    Rng rng(4);
    for (const auto& [name, g] : small_graphs())
        for (const auto& b : conditions()) {
            const auto params = RCParams::uniform(g.edge_count(), 0.5, 2.0);
            HeatBath fast(g, params, b), slow(g, params, b, Connectivity::UnionFind);
            for (int trial = 0; trial < 200; ++trial) {
                std::vector<std::uint8_t> open(g.edge_count());
                for (auto& o : open) o = rng.uniform() < 0.5;
                fast.set_state(open);
                slow.set_state(open);
                for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(fast.connected_off(e) == slow.connected_off(e));
            }
        }
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 16), 0);
    const auto params = RCParams::from_weights(rc_weights(g, 2.0, 1.0));
    HeatBath fast(g, params, BoundaryCondition::wired()), slow(g, params, BoundaryCondition::wired(),
                                                                Connectivity::UnionFind);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::uint8_t> open(g.edge_count());
        for (auto& o : open) o = rng.uniform() < 0.5;
        fast.set_state(open);
        slow.set_state(open);
        for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(fast.connected_off(e) == slow.connected_off(e));
    }
}

TEST_CASE("heat-bath updates leave the exact law invariant") {
    for (const auto& [name, g] : small_graphs()) {
        CAPTURE(name);
        std::vector<BoundaryCondition> bcs = conditions();
        std::vector<std::vector<VertexId>> singletons;
        for (VertexId v : g.boundary) singletons.push_back({v});
        bcs.push_back(BoundaryCondition::partition(singletons));
        for (double q : {1.0, 2.0, 4.0, 9.0})
            for (const auto& b : bcs) {
                RCParams params = RCParams::uniform(g.edge_count(), 0.5, q);
                for (std::size_t e = 0; e < params.p.size(); ++e) params.p[e] = 0.2 + 0.6 * (e % 5) / 4.0;
                const auto exact = exact_rc_distribution(g, params, b);
                HeatBath hb(g, params, b);
                double worst = 0;
                for (EdgeId e = 0; e < g.edge_count(); ++e) {
                    const auto next = apply_heat_bath_update(hb, e, exact);
                    for (std::size_t s = 0; s < exact.size(); ++s) worst = std::max(worst, std::abs(next[s] - exact[s]));
                }
                CHECK(worst <= 1e-10);
            }
    }
    const auto g = small_graphs()[1].graph;
    HeatBath hb(g, RCParams::uniform(2, 0.37, 1.0), {});
    hb.set_state({1, 0});
    CHECK(hb.open_probability(0) == 0.37);
    CHECK(hb.open_probability(1) == 0.37);
}

TEST_CASE("heat-bath sampling") {
    const auto edge = small_graphs()[0].graph;
    HeatBath hb(edge, RCParams::uniform(1, 0.5, 2.0), {});
    Rng rng(8);
    double open = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        hb.sweep(rng);
        open += hb.state()[0];
    }
    const double f = open / n;
    CHECK(std::abs(f - 1.0 / 3) <= 4 * std::sqrt(2.0 / 9 / n));

    const auto square = grid_graph(2, 2);
    for (const auto& b : conditions()) {
        const auto params = RCParams::uniform(4, 0.6, 2.0);
        const auto exact = exact_rc_distribution(square, params, b);
        HeatBath chain(square, params, b);
        std::vector<double> hist(exact.size(), 0.0);
        const int sweeps = 1000000;
        for (int i = 0; i < sweeps; ++i) {
            chain.sweep(rng);
            hist[config_index(chain.state())] += 1.0 / sweeps;
        }
        CHECK(total_variation(hist, exact) <= 0.01);
    }

    Rng a(3), b(3);
    const auto g = grid_graph(3, 3);
    const auto params = RCParams::uniform(12, 0.55, 2.0);
    const auto c1 = rc_heat_bath_sample(g, params, {}, 50, a);
    CHECK(c1.open == rc_heat_bath_sample(g, params, {}, 50, b).open);
    CHECK_FALSE(c1.weights_id.empty());
}

TEST_CASE("q = 1 chain matches product sampling") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 24), 0);
    const CrossingSpec spec{square_lattice_box({12, 12}, 6, 7), CrossingDirection::Horizontal};
    const BoxCrossing box(g, spec);
    const auto params = RCParams::uniform(g.edge_count(), 0.5, 1.0);
    const auto w = uniform_percolation_weights(g.edge_count(), 0.5);
    const int n = 2000;
    std::vector<double> chain_open(n), chain_cross(n), prod_open(n), prod_cross(n);
    for (int s = 0; s < n; ++s) {
        Rng r1(21, s), r2(22, s);
        const auto c = rc_heat_bath_sample(g, params, BoundaryCondition::wired(), 1, r1);
        chain_open[s] = static_cast<double>(c.open_count()) / g.edge_count();
        chain_cross[s] = box.crosses_graph(c.open);
        std::vector<std::uint8_t> open;
        sample_open(w, r2, open);
        prod_open[s] = static_cast<double>(std::count(open.begin(), open.end(), 1)) / g.edge_count();
        prod_cross[s] = box.crosses_graph(open);
    }
    for (auto [x, y] : {std::pair{&chain_open, &prod_open}, std::pair{&chain_cross, &prod_cross}}) {
        const auto a = summarize(*x), b = summarize(*y);
        CHECK(std::abs(a.value - b.value) <= 4 * std::hypot(a.std_error, b.std_error));
    }
}

TEST_CASE("crossing scans") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 24), 0);
    const CrossingSpec spec{square_lattice_box({12, 12}, 6, 7), CrossingDirection::Horizontal};
    const ChainOptions chain{30, 5, 2};
    const std::vector<double> grid{0.45, 0.55, 0.6, 0.65, 0.75};
    const auto free = rc_crossing_scan(g, 2.0, grid, BoundaryCondition::free(), spec, 40, chain, {1, 1, 20});
    const auto wired = rc_crossing_scan(g, 2.0, grid, BoundaryCondition::wired(), spec, 40, chain, {1, 1, 20});
    CHECK(free.monotone);
    CHECK(wired.monotone);
    CHECK(free.sweeps_per_chain == 40);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& f = free.rows[i].crossing;
        const auto& w = wired.rows[i].crossing;
        CHECK(w.value >= f.value - 3 * std::hypot(f.std_error, w.std_error));
    }
    const auto again = rc_crossing_scan(g, 2.0, grid, BoundaryCondition::free(), spec, 40, chain, {1, 3, 20});
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(again.rows[i].crossing.value == free.rows[i].crossing.value);

    // q = 1 self-duality of the n x (n+1) box
    const auto d = dual_graph(g);
    const OrientedBox pb = square_lattice_box({12, 12}, 6, 7);
    const OrientedBox db{pb.center, pb.height, pb.width, pb.tilt};
    const auto h = rc_crossing_scan(g, 1.0, {0.5}, BoundaryCondition::wired(), {pb, CrossingDirection::Horizontal},
                                    200, {5, 5, 1}, {2, 1, 20});
    const auto v = rc_crossing_scan(d, 1.0, {0.5}, BoundaryCondition::free(), {db, CrossingDirection::Vertical}, 200,
                                    {5, 5, 1}, {3, 1, 20});
    const auto& hc = h.rows[0].crossing;
    const auto& vc = v.rows[0].crossing;
    CHECK(std::abs(hc.value + vc.value - 1) <= 4 * std::hypot(hc.std_error, vc.std_error));
}

TEST_CASE("steepest rise") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(0.4 + 0.01 * i);
        y.push_back(1 / (1 + std::exp(-(x.back() - 0.513) / 0.02)));
    }
    CHECK(std::abs(steepest_rise(x, y) - 0.513) <= 0.003);
    CHECK(steepest_rise({0, 1}, {0, 1}) == 0.5);
}

TEST_CASE("critical surface") {
    for (double q : {1.0, 2.0, 4.0, 9.0}) {
        const double p = rc_critical_p(q);
        CHECK(std::abs(critical_surface_residual(p, p, q)) <= 1e-12);
    }
    CHECK(std::abs(critical_surface_residual(0.8, 0.5, 4)) <= 1e-12);
    CHECK(critical_surface_residual(0.5, 0.5, 2) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(critical_surface_residual(0.5, 0.5, 0.5), Error);
}

TEST_CASE("two-point decay") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 32), 0);
    try {
        rc_two_point_decay(g, 4, 1.0, {0, 1, 2}, 2, {}, {});
        FAIL("expected OutOfRegime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutOfRegime);
    }
    std::vector<double> dist;
    for (int k = 0; k <= 8; ++k) dist.push_back(k * std::sqrt(2.0));
    const auto r = rc_two_point_decay(g, 4, 0.7, dist, 16, {40, 10, 2}, {5, 1, 16});
    CHECK(r.curve.estimate[0] == 1.0);
    CHECK(r.exponential.estimate > 0);
    CHECK(r.exponential.window.lo > dist[1]);
    CHECK_NOTHROW(rc_two_point_decay(g, 1, 1.2, dist, 2, {5, 2, 1}, {5, 1, 2}, false));
}
