#include "doctest.h"

#include "isoperc/error.hpp"
#include "isoperc/percsim.hpp"
#include "isoperc/serialize.hpp"

#include <cmath>
#include <numbers>
#include <queue>

using namespace isoperc;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<int> bfs_labels(const IsoradialGraph& g, const std::vector<std::uint8_t>& open) {
    std::vector<std::vector<VertexId>> adj(g.vertex_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (!open[e]) continue;
        adj[g.edges[e].u].push_back(g.edges[e].v);
        adj[g.edges[e].v].push_back(g.edges[e].u);
    }
    std::vector<int> label(g.vertex_count(), -1);
    int next = 0;
    for (VertexId s = 0; s < g.vertex_count(); ++s) {
        if (label[s] >= 0) continue;
        std::queue<VertexId> q;
        q.push(s);
        label[s] = next;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            for (auto w : adj[v])
                if (label[w] < 0) {
                    label[w] = next;
                    q.push(w);
                }
        }
        ++next;
    }
    return label;
}

IsoradialGraph random_graph(Rng& rng, int n, int m) {
    std::vector<Vec2> pos;
    for (int i = 0; i < n; ++i) pos.push_back({rng.uniform() * 10, rng.uniform() * 10});
    std::vector<Edge> edges;
    for (int k = 0; k < m; ++k) {
        const auto u = static_cast<VertexId>(rng.below(n));
        auto v = static_cast<VertexId>(rng.below(n));
        if (u == v) v = (v + 1) % n;
        edges.push_back({u, v});
    }
    return make_graph(std::move(pos), std::move(edges));
}

const IsoradialGraph& square_graph() {
    static const IsoradialGraph g = build_isoradial(periodic_tiling(PeriodicKind::Square, 40), 0);
    return g;
}

} // namespace

TEST_CASE("sampling") {
    Rng rng(1);
    auto zero = uniform_percolation_weights(1000, 0.0);
    CHECK(sample_configuration(zero, rng).open_count() == 0);
    const auto near_one = sample_configuration(uniform_percolation_weights(1000000, 1 - 1e-12), rng);
    CHECK(near_one.open_count() >= 1000000 - 1);
    const auto half = sample_configuration(uniform_percolation_weights(1000000, 0.5), rng);
    CHECK(std::abs(half.open_count() / 1e6 - 0.5) <= 0.002);
    CHECK_FALSE(half.weights_id.empty());

    Rng a(42, 3), b(42, 3);
    const auto w = uniform_percolation_weights(500, 0.3);
    CHECK(sample_configuration(w, a).open == sample_configuration(w, b).open);

    try {
        sample_configuration(uniform_rc_weights(10, 2.0, 0.5), rng);
        FAIL("expected WrongModel");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WrongModel);
    }
}

TEST_CASE("cluster decomposition matches breadth-first search") {
    Rng rng(9);
    for (int graph = 0; graph < 40; ++graph) {
        const int n = 2 + static_cast<int>(rng.below(49));
        const auto g = random_graph(rng, n, static_cast<int>(rng.below(3 * n)) + 1);
        const auto w = uniform_percolation_weights(g.edge_count(), rng.uniform());
        for (int c = 0; c < (graph < 5 ? 1000 : 100); ++c) {
            std::vector<std::uint8_t> open;
            sample_open(w, rng, open);
            const auto d = cluster_decomposition(g, open);
            const auto oracle = bfs_labels(g, open);
            std::size_t total = 0;
            for (auto s : d.size) total += s;
            CHECK(total == g.vertex_count());
            for (VertexId v = 0; v < g.vertex_count(); ++v)
                CHECK(static_cast<int>(d.label[v]) == oracle[v]);  // both number clusters by lowest vertex
        }
    }
    const auto& g = square_graph();
    const auto closed = cluster_decomposition(g, std::vector<std::uint8_t>(g.edge_count(), 0));
    CHECK(closed.count() == g.vertex_count());
    const auto all = cluster_decomposition(g, std::vector<std::uint8_t>(g.edge_count(), 1));
    CHECK(all.count() == 1);
    CHECK(all.largest() == g.vertex_count());
    CHECK_THROWS_AS(cluster_decomposition(g, std::vector<std::uint8_t>(3, 0)), Error);
}

TEST_CASE("cluster radius") {
    const auto g = make_graph({{0, 0}, {1, 0}, {2, 0}, {5, 5}}, {{0, 1}, {1, 2}});
    const auto d = cluster_decomposition(g, {1, 1});
    CHECK(cluster_radius(g, d, 0) == 2.0);
    CHECK(cluster_radius(g, d, 1) == 1.0);
    CHECK(cluster_radius(g, d, 3) == 0.0);
}

TEST_CASE("one-arm, volume and two-point curves on the square lattice") {
    const auto& g = square_graph();
    const auto w = percolation_weights(g, 1.0);
    const RunOptions opt{5, 2, 50};
    const auto arm = one_arm_curve(g, w, {0, 1, 2, 4}, 400, opt);
    CHECK(arm.estimate[0] == 1.0);
    CHECK(std::abs(arm.estimate[1] - 15.0 / 16) <= 3 * arm.std_error[1]);
    CHECK(arm.estimate[2] < arm.estimate[1]);
    CHECK(arm.batch_means[1].size() == 50);

    const auto vol = volume_tail_curve(g, w, {1, 2, 10}, 200, opt);
    CHECK(vol.estimate[0] == 1.0);
    CHECK(std::abs(vol.estimate[1] - 15.0 / 16) <= 3 * vol.std_error[1] + 1e-12);

    const auto tp = two_point_curve(g, w, {0, 2, 4, 8}, 200, opt);
    CHECK(tp.estimate[0] == 1.0);
    // (2,0) is a lattice neighbour of the origin in this embedding... of distance sqrt(2)
    // with (1,1): two steps apart. (1,1) itself is adjacent.
    const auto adj = two_point_curve(g, w, {std::numbers::sqrt2}, 200, opt, {1, 1});
    CHECK(adj.estimate[0] >= 0.5);
    CHECK(tp.estimate[3] < tp.estimate[1]);
}

TEST_CASE("determinism and thread independence") {
    const auto& g = square_graph();
    const auto w = percolation_weights(g, 1.0);
    const auto a = one_arm_curve(g, w, {1, 3, 5}, 64, {77, 1, 16});
    const auto b = one_arm_curve(g, w, {1, 3, 5}, 64, {77, 4, 16});
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    const auto c = one_arm_curve(g, w, {1, 3, 5}, 64, {78, 1, 16});
    CHECK(a.estimate != c.estimate);
}

TEST_CASE("edges leaving through a crossing side reach it only when open") {
    // path -1 .. 2 on the x-axis; the box holds the middle edge only
    const auto g = make_graph({{-1, 0}, {0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}, {2, 3}});
    const CrossingSpec across{{{0.5, 0}, 2, 1, 0}, CrossingDirection::Horizontal};
    const BoxCrossing bc(g, across);
    CHECK(bc.vertex_count() == 2);
    CHECK(bc.edge_count() == 3);
    CHECK(bc.terminal_count(true) == 0);
    CHECK(exact_crossing_probability(g, uniform_percolation_weights(3, 0.5), across) == doctest::Approx(0.125));
    CHECK(bc.crosses_graph({1, 1, 1}));
    CHECK_FALSE(bc.crosses_graph({0, 1, 1}));
    // leaving through the top or bottom does not help a horizontal crossing
    const CrossingSpec up{{{0.5, 0}, 2, 1, 0}, CrossingDirection::Vertical};
    CHECK(BoxCrossing(g, up).edge_count() == 1);
    CHECK_FALSE(BoxCrossing(g, up).crosses_graph({1, 1, 1}));
}

TEST_CASE("small box crossing against enumeration") {
    const auto& g = square_graph();
    const auto w = percolation_weights(g, 1.0);
    const CrossingSpec spec{square_lattice_box({20, 20}, 2, 3), CrossingDirection::Horizontal};
    const BoxCrossing bc(g, spec);
    CHECK(bc.vertex_count() == 6);
    CHECK(bc.edge_count() == 7);
    CHECK(bc.terminal_count(true) == 2);
    CHECK(bc.terminal_count(false) == 2);
    CHECK(exact_crossing_probability(g, w, spec) == doctest::Approx(0.5).epsilon(1e-14));
    const auto mc = crossing_probability(g, w, spec, 20000, {3, 2, 100});
    CHECK(std::abs(mc.value - 0.5) <= 4 * mc.std_error);

    // asymmetric p: enumeration oracle against Monte Carlo
    const auto w2 = uniform_percolation_weights(g.edge_count(), 0.35);
    const CrossingSpec tall{square_lattice_box({20, 20}, 3, 3), CrossingDirection::Vertical};
    const double exact = exact_crossing_probability(g, w2, tall);
    const auto mc2 = crossing_probability(g, w2, tall, 20000, {4, 2, 100});
    CHECK(std::abs(mc2.value - exact) <= 4 * mc2.std_error);

    CHECK(crossing_probability(g, uniform_percolation_weights(g.edge_count(), 0.0), spec, 100, {}).value == 0.0);
    const CrossingSpec outside{{{0, 0}, 10, 10, 0}, CrossingDirection::Horizontal};
    try {
        crossing_probability(g, w, outside, 10, {});
        FAIL("expected Geometry");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Geometry);
    }
}

TEST_CASE("self-duality of the n x (n+1) box") {
    const auto& g = square_graph();
    const auto d = dual_graph(g);
    const int n = 8;
    const OrientedBox primal_box = square_lattice_box({20, 20}, n, n + 1);
    const OrientedBox dual_box{primal_box.center, primal_box.height, primal_box.width, primal_box.tilt};
    const BoxCrossing primal(g, {primal_box, CrossingDirection::Horizontal});
    const BoxCrossing dual(d, {dual_box, CrossingDirection::Vertical});
    CHECK(dual.vertex_count() == static_cast<std::size_t>(n * (n + 1)));
    Rng rng(12);
    const auto w = percolation_weights(g, 1.0);
    for (int s = 0; s < 2000; ++s) {
        std::vector<std::uint8_t> open;
        sample_open(w, rng, open);
        std::vector<std::uint8_t> dual_open(open.size());
        for (std::size_t e = 0; e < open.size(); ++e) dual_open[e] = !open[e];
        CHECK(primal.crosses_graph(open) != dual.crosses_graph(dual_open));
    }
    const auto a = crossing_probability(g, w, {primal_box, CrossingDirection::Horizontal}, 4000, {1, 2, 40});
    const auto b = crossing_probability(d, percolation_weights(d, 1.0), {dual_box, CrossingDirection::Vertical}, 4000,
                                        {2, 2, 40});
    CHECK(std::abs(a.value + b.value - 1) <= 4 * std::hypot(a.std_error, b.std_error));
}

TEST_CASE("monotone coupling across beta") {
    const auto& g = square_graph();
    const CrossingSpec spec{square_lattice_box({20, 20}, 6, 7), CrossingDirection::Horizontal};
    std::vector<EdgeWeights> ws;
    for (double beta : {0.5, 0.8, 1.0, 1.3, 2.0}) ws.push_back(percolation_weights(g, beta));
    const auto hits = coupled_crossings(g, ws, spec, 500, {8, 2, 10});
    for (std::size_t s = 0; s < 500; ++s)
        for (std::size_t k = 1; k < ws.size(); ++k) CHECK(hits[k][s] >= hits[k - 1][s]);
}

TEST_CASE("near-critical scan limits") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 48), 0);
    const auto rows = near_critical_scan(g, {1e-4, 1.0, 5.0}, 40, {6, 2, 10});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].theta.value < 1e-3);
    CHECK(rows[0].chi_finite.value == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(rows[0].clusters_per_vertex.value > 0.99);
    CHECK(rows[2].largest_fraction.value > 0.9);
    CHECK(rows[2].spanning.value == 1.0);
    CHECK(rows[1].theta.value <= rows[2].theta.value);
}

TEST_CASE("space-time crossing") {
    const auto tiny = spacetime_crossing({pi / 4, 1e-3, {0, 0}}, 2000, {1, 2, 10});
    CHECK(tiny.value > 0.99);
    const auto mid = spacetime_crossing({pi / 4, 16, {0, 0}}, 4000, {2, 2, 10});
    CHECK(mid.value > 0.35);
    CHECK(mid.value < 0.65);
    // sides on the lines x = 0 and x = 1: crossed iff a bridge lands in the unit height
    const auto upright = spacetime_crossing({0.0, 1.0, {0.5, 0.0}}, 20000, {3, 2, 10});
    CHECK(std::abs(upright.value - (1 - std::exp(-1.0))) < 4 * upright.std_error);
    Rng a(5), b(5);
    CHECK(spacetime_crossing_sample({0.3, 10, {0.2, 0.1}}, a) == spacetime_crossing_sample({0.3, 10, {0.2, 0.1}}, b));
}
