#include "doctest.h"

#include "isoperc/error.hpp"
#include "isoperc/isoradial.hpp"

#include <cmath>
#include <map>
#include <numbers>

using namespace isoperc;

namespace {

constexpr double pi = std::numbers::pi;

double bisect(double lo, double hi, auto f) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

std::map<std::size_t, int> interior_degree_histogram(const IsoradialGraph& g) {
    std::map<std::size_t, int> h;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
        if (!g.is_boundary(v)) ++h[g.degree(v)];
    return h;
}

void check_isoradial_geometry(const IsoradialGraph& g) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const double chord = norm(g.positions[g.edges[e].u] - g.positions[g.edges[e].v]);
        CHECK(chord == doctest::Approx(2 * std::sin(g.theta[e] / 2)).epsilon(1e-9));
    }
    for (const Face& f : g.faces) {
        CHECK(f.vertices.size() >= 3);
        for (VertexId v : f.vertices) CHECK(std::abs(norm(g.positions[v] - f.circumcenter) - 1) < 1e-6);
    }
}

} // namespace

TEST_CASE("square tiling gives the square lattice") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 6), 0);
    for (double t : g.theta) CHECK(t == doctest::Approx(pi / 2));
    const auto hist = interior_degree_histogram(g);
    REQUIRE(hist.size() == 1);
    CHECK(hist.begin()->first == 4);
    check_isoradial_geometry(g);
    for (const Face& f : g.faces) CHECK(f.vertices.size() == 4);

    const auto d = dual_graph(g);
    CHECK(d.edge_count() == g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(g.theta[e] + d.theta[e] == doctest::Approx(pi));
    const auto dh = interior_degree_histogram(d);
    CHECK(dh.size() == 1);
    CHECK(dh.begin()->first == 4);
}

TEST_CASE("triangular and hexagonal lattices are dual") {
    const auto tiling = std::make_shared<const RhombicTiling>(periodic_tiling(PeriodicKind::TriangularHexagonal, 5));
    const auto tri = build_isoradial(tiling, 0);
    for (double t : tri.theta) CHECK(t == doctest::Approx(2 * pi / 3));
    const auto th = interior_degree_histogram(tri);
    REQUIRE(th.size() == 1);
    CHECK(th.begin()->first == 6);
    for (const Face& f : tri.faces) CHECK(f.vertices.size() == 3);
    check_isoradial_geometry(tri);

    const auto hex = dual_graph(tri);
    for (double t : hex.theta) CHECK(t == doctest::Approx(pi / 3));
    const auto hh = interior_degree_histogram(hex);
    REQUIRE(hh.size() == 1);
    CHECK(hh.begin()->first == 3);
    for (const Face& f : hex.faces) CHECK(f.vertices.size() == 6);
    check_isoradial_geometry(hex);
}

TEST_CASE("penrose graph faces have circumradius one") {
    const auto g = build_isoradial(penrose_tiling(14), 0);
    CHECK(g.faces.size() > 20);
    check_isoradial_geometry(g);
    check_isoradial_geometry(dual_graph(g));
}

TEST_CASE("graphs without a tiling have no dual") {
    const auto g = make_graph({{0, 0}, {1, 0}}, {{0, 1}});
    try {
        dual_graph(g);
        FAIL("expected MissingSource");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingSource);
    }
}

TEST_CASE("invalid tilings are rejected") {
    auto rhombi = periodic_tiling(PeriodicKind::Square, 2).rhombi();
    rhombi[0].dir_a = rhombi[0].dir_a * 1.1;
    CHECK_THROWS_AS(build_isoradial(RhombicTiling::from_rhombi(rhombi), 0), Error);
}

TEST_CASE("patch mask clearance and box restriction") {
    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 40), 0);
    CHECK(g.clearance({20, 20}) == doctest::Approx(20).epsilon(0.05));
    CHECK(g.clearance({-5, 20}) < 0);
    CHECK(g.clearance({3, 20}) <= 3.0);
    CHECK(g.mask->contains_box({{20, 20}, 10, 10, pi / 4}, 4));
    CHECK_FALSE(g.mask->contains_box({{20, 20}, 40, 10, 0}, 4));

    const OrientedBox box{{20, 20}, 4 * std::sqrt(2.0), 4 * std::sqrt(2.0), pi / 4};
    const auto sub = restrict_to_box(g, box);
    CHECK(sub.vertex_count() == 25);
    CHECK(sub.edge_count() == 40);
    CHECK(sub.boundary.size() == 16);
}

TEST_CASE("canonical percolation weights") {
    CHECK(canonical_percolation_p(pi / 2) == doctest::Approx(0.5).epsilon(1e-15));
    const double root = bisect(0.0, 0.5, [](double p) { return p * p * p - 3 * p + 1; });
    CHECK(std::abs(canonical_percolation_p(2 * pi / 3) - root) < 1e-12);
    CHECK(std::abs(canonical_percolation_p(2 * pi / 3) - 2 * std::sin(pi / 18)) < 1e-12);
    CHECK(std::abs(canonical_percolation_p(pi / 3) - (1 - root)) < 1e-12);

    double previous = 1.0;
    for (int i = 1; i < 1000; ++i) {
        const double theta = pi * i / 1000;
        const double p = canonical_percolation_p(theta);
        CHECK(std::abs(p + canonical_percolation_p(pi - theta) - 1) < 1e-12);
        CHECK(p < previous);
        previous = p;
    }
    CHECK_THROWS_AS(canonical_percolation_p(0.0), Error);
    CHECK_THROWS_AS(canonical_percolation_p(1.0, 0.0), Error);

    const auto g = build_isoradial(periodic_tiling(PeriodicKind::Square, 3), 0);
    const auto w = percolation_weights(g, 2.0);
    for (std::size_t e = 0; e < w.p.size(); ++e) {
        CHECK(w.p[e] / (1 - w.p[e]) == doctest::Approx(2.0));
    }
}

TEST_CASE("random-cluster sigma and weights") {
    CHECK(rc_sigma(1).sigma == doctest::Approx(2.0 / 3));
    CHECK(rc_sigma(2).sigma == doctest::Approx(0.5));
    CHECK(rc_sigma(4).sigma == 0.0);
    CHECK(rc_sigma(4).branch == SigmaBranch::Critical);
    CHECK(rc_sigma(9).branch == SigmaBranch::Hyperbolic);
    CHECK(std::cosh(rc_sigma(9).sigma * pi / 2) == doctest::Approx(1.5));
    try {
        rc_sigma(0.5);
        FAIL("expected UnsupportedParameter");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedParameter);
    }

    for (double q : {1.0, 2.0, 3.5, 4.0, 9.0}) {
        CHECK(canonical_rc_y(pi / 2, q) == doctest::Approx(std::sqrt(q)).epsilon(1e-12));
        for (int i = 1; i < 200; ++i) {
            const double theta = pi * i / 200;
            CHECK(std::abs(canonical_rc_y(theta, q) * canonical_rc_y(pi - theta, q) - q) < 1e-9);
        }
    }
    CHECK(canonical_rc_y(pi / 2, 4) == doctest::Approx(2.0));
    for (int i = 1; i < 50; ++i) {
        const double theta = pi * i / 50;
        const double limit = 2 * (pi - theta) / theta;
        CHECK(std::abs(canonical_rc_y(theta, 4 + 1e-6) - limit) <= 1e-4);
        CHECK(std::abs(canonical_rc_y(theta, 4 - 1e-6) - limit) <= 1e-4);
        const double y1 = canonical_rc_y(theta, 1);
        CHECK(std::abs(y1 / (1 + y1) - canonical_percolation_p(theta)) < 1e-12);
    }

    const auto g = build_isoradial(penrose_tiling(8), 0);
    const auto perc = percolation_weights(g, 0.7);
    const auto rc = rc_weights(g, 1.0, 0.7);
    for (std::size_t e = 0; e < g.edge_count(); ++e) CHECK(std::abs(perc.p[e] - rc.p[e]) < 1e-12);
    const auto rc4 = rc_weights(g, 4.0, 1.0);
    CHECK(rc4.q == 4.0);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        CHECK(std::abs(rc4.p[e] - rc4.y[e] / (1 + rc4.y[e])) < 1e-12);
}
