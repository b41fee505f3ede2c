#pragma once

#include "isoperc/isoradial.hpp"

#include <string>
#include <vector>

namespace isoperc::testing {

struct NamedGraph {
    std::string name;
    IsoradialGraph graph;
};

// rows x cols grid with unit spacing; the outer ring is the boundary
inline IsoradialGraph grid_graph(int rows, int cols) {
    std::vector<Vec2> pos;
    std::vector<Edge> edges;
    std::vector<VertexId> boundary;
    auto id = [cols](int r, int c) { return static_cast<VertexId>(r * cols + c); };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            pos.push_back({static_cast<double>(c), static_cast<double>(r)});
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
            if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) boundary.push_back(id(r, c));
        }
    return make_graph(std::move(pos), std::move(edges), {}, std::move(boundary));
}

// Every graph here has at most 12 edges and a nonempty boundary.
inline std::vector<NamedGraph> small_graphs() {
    std::vector<NamedGraph> out;
    out.push_back({"edge", make_graph({{0, 0}, {1, 0}}, {{0, 1}}, {}, {0, 1})});
    out.push_back({"path", make_graph({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}}, {}, {0, 2})});
    out.push_back({"triangle", make_graph({{0, 0}, {1, 0}, {0.5, 0.8}}, {{1, 2}, {0, 2}, {0, 1}}, {}, {0, 1, 2})});
    out.push_back({"star", make_graph({{0, 0}, {1, 0}, {0.5, 0.8}, {0.5, 0.3}}, {{3, 0}, {3, 1}, {3, 2}}, {}, {0, 1, 2})});
    out.push_back({"square", grid_graph(2, 2)});
    out.push_back({"k4", make_graph({{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                                    {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}, {}, {0, 1})});
    out.push_back({"grid2x3", grid_graph(2, 3)});
    out.push_back({"grid3x3", grid_graph(3, 3)});
    out.push_back({"theta", make_graph({{0, 0}, {1, 1}, {1, 0}, {1, -1}, {2, 0}},
                                       {{0, 1}, {0, 2}, {0, 3}, {1, 4}, {2, 4}, {3, 4}, {1, 2}, {2, 3}}, {},
                                       {0, 4})});
    return out;
}

} // namespace isoperc::testing
