#include "isoperc/error.hpp"
#include "isoperc/parallel.hpp"
#include "isoperc/percsim.hpp"
#include "isoperc/union_find.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isoperc {

namespace {

constexpr double kSideTol = 1e-7;

struct LineInterval {
    long long x = 0;
    double a = 0, b = 0;
    std::uint32_t first_node = 0;     // node of the lowest segment
    std::vector<double> cuts;         // increasing, inside (a, b)
};

// Left/right side bits (1, 2) of a box-boundary point given in the box frame.
unsigned lr_sides(Vec2 l, double half) {
    unsigned s = 0;
    if (std::abs(l.x + half) <= kSideTol * std::max(1.0, half)) s |= 1;
    if (std::abs(l.x - half) <= kSideTol * std::max(1.0, half)) s |= 2;
    return s;
}

// Parameter range [t0, t1] of a + t d (t in [0, 1]) inside the square |x|,|y| <= half.
bool clip(Vec2 a, Vec2 d, double half, double& t0, double& t1) {
    t0 = 0;
    t1 = 1;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {a.x + half, half - a.x, a.y + half, half - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0) {
            if (q[k] < 0) return false;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
    }
    return t0 <= t1;
}

} // namespace

bool spacetime_crossing_sample(const SpacetimeSpec& spec, Rng& rng) {
    if (!(spec.side > 0)) throw Error(ErrorKind::InvalidParameter, "box side must be positive");
    const OrientedBox box{spec.center, spec.side, spec.side, spec.alpha};
    const double half = spec.side / 2;
    const auto corners = box.corners();
    double xmin = corners[0].x, xmax = xmin, ymin = corners[0].y, ymax = ymin;
    for (Vec2 c : corners) {
        xmin = std::min(xmin, c.x);
        xmax = std::max(xmax, c.x);
        ymin = std::min(ymin, c.y);
        ymax = std::max(ymax, c.y);
    }

    // nodes 0 and 1 are the left and right sides of the box
    std::uint32_t nodes = 2;
    std::vector<LineInterval> lines;
    for (auto x = static_cast<long long>(std::ceil(xmin)); x <= static_cast<long long>(std::floor(xmax)); ++x) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int k = 0; k < 4; ++k) {
            const Vec2 p = corners[k], q = corners[(k + 1) % 4];
            const double x0 = std::min(p.x, q.x), x1 = std::max(p.x, q.x);
            if (x < x0 || x > x1) continue;
            if (p.x == q.x) {
                lo = std::min({lo, p.y, q.y});
                hi = std::max({hi, p.y, q.y});
            } else {
                const double y = p.y + (q.y - p.y) * (static_cast<double>(x) - p.x) / (q.x - p.x);
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
        }
        if (!(lo <= hi)) continue;
        LineInterval li;
        li.x = x;
        li.a = lo;
        li.b = hi;
        for (double y = lo + rng.exponential(); y < hi; y += rng.exponential()) li.cuts.push_back(y);
        li.first_node = nodes;
        nodes += static_cast<std::uint32_t>(li.cuts.size() + 1);
        lines.push_back(std::move(li));
    }

    const auto first_x = static_cast<long long>(std::floor(xmin));
    const auto last_x = static_cast<long long>(std::ceil(xmax));
    std::vector<std::pair<long long, double>> bridges;
    for (long long x = first_x; x < last_x; ++x)
        for (double y = ymin + rng.exponential(); y < ymax; y += rng.exponential()) bridges.emplace_back(x, y);

    // bridges are nodes too, after the line segments
    DisjointSets ds(nodes + bridges.size());
    for (const auto& li : lines) {
        const Vec2 bottom{static_cast<double>(li.x), li.a}, top{static_cast<double>(li.x), li.b};
        const std::uint32_t last = li.first_node + static_cast<std::uint32_t>(li.cuts.size());
        const unsigned sb = lr_sides(box.to_local(bottom), half), st = lr_sides(box.to_local(top), half);
        if (sb & 1) ds.unite(li.first_node, 0);
        if (sb & 2) ds.unite(li.first_node, 1);
        if (st & 1) ds.unite(last, 0);
        if (st & 2) ds.unite(last, 1);
        // a line lying along a side touches it with every segment
        if (const unsigned along = sb & st; along != 0 && li.b > li.a)
            for (std::uint32_t n = li.first_node; n <= last; ++n) {
                if (along & 1) ds.unite(n, 0);
                if (along & 2) ds.unite(n, 1);
            }
    }

    auto line_index = [&](long long x) -> const LineInterval* {
        if (lines.empty() || x < lines.front().x || x > lines.back().x) return nullptr;
        return &lines[static_cast<std::size_t>(x - lines.front().x)];
    };
    auto segment_at = [](const LineInterval& li, double y) {
        return li.first_node +
               static_cast<std::uint32_t>(std::lower_bound(li.cuts.begin(), li.cuts.end(), y) - li.cuts.begin());
    };
    // attach one end of a clipped bridge: to the line segment when the end is
    // the bridge's own endpoint, to the box side(s) when it was clipped
    auto attach = [&](std::uint32_t bridge, bool own_end, long long x, double y, Vec2 point) {
        if (own_end) {
            const LineInterval* li = line_index(x);
            if (li && y >= li->a - 1e-12 && y <= li->b + 1e-12) {
                ds.unite(bridge, segment_at(*li, y));
                return;
            }
        }
        const unsigned s = lr_sides(box.to_local(point), half);
        if (s & 1) ds.unite(bridge, 0);
        if (s & 2) ds.unite(bridge, 1);
    };

    for (std::size_t k = 0; k < bridges.size(); ++k) {
        const auto [x, y] = bridges[k];
        const auto node = nodes + static_cast<std::uint32_t>(k);
        const Vec2 a = box.to_local({static_cast<double>(x), y});
        const Vec2 d = box.to_local({static_cast<double>(x + 1), y}) - a;
        double t0, t1;
        if (!clip(a, d, half, t0, t1)) continue;
        const double tt = 1e-12;
        attach(node, t0 <= tt, x, y, box.to_world(a + d * t0));
        attach(node, t1 >= 1 - tt, x + 1, y, box.to_world(a + d * t1));
    }
    return ds.same(0, 1);
}

Estimate spacetime_crossing(const SpacetimeSpec& spec, std::size_t samples, const RunOptions& options) {
    std::vector<double> hits(samples);
    for_each_replica(samples, options.threads, [&](std::size_t s) {
        Rng rng(options.seed, s);
        hits[s] = spacetime_crossing_sample(spec, rng) ? 1.0 : 0.0;
    });
    return summarize(hits);
}

} // namespace isoperc
