#pragma once

#include "isoperc/geometry.hpp"
#include "isoperc/tiling.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace isoperc {

using EdgeId = std::uint32_t;

struct Edge {
    VertexId u = 0;
    VertexId v = 0;
};

struct Face {
    std::vector<VertexId> vertices;  // counter-clockwise around the circumcentre
    Vec2 circumcenter;
};

/// Raster of the region covered by a tiling patch, used to measure how far a
/// point sits from the patch boundary.
class PatchMask {
public:
    explicit PatchMask(const RhombicTiling& tiling, double cell = 0.5);

    /// Distance (up to one cell) from `p` to the patch boundary; negative
    /// outside the patch.
    double clearance(Vec2 p) const;
    /// True when every point of the box lies at least `margin` inside.
    bool contains_box(const OrientedBox& box, double margin) const;

private:
    Vec2 origin_;
    double cell_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::int32_t> distance_;  // cells to boundary; -1 outside
};

/// Embedded planar graph. Graphs derived from a tiling carry the tiling, the
/// colour class and a patch mask; graphs built from raw data carry neither.
struct IsoradialGraph {
    std::vector<Vec2> positions;
    std::vector<Edge> edges;
    std::vector<double> theta;  // rhombus angle opposite each edge
    std::vector<Face> faces;
    std::vector<VertexId> boundary;

    std::vector<VertexId> tiling_vertex;  // graph vertex -> tiling vertex
    std::vector<RhombusId> edge_rhombus;  // graph edge -> tiling rhombus
    std::shared_ptr<const RhombicTiling> tiling;
    std::shared_ptr<const PatchMask> mask;
    int colour_class = 0;

    std::size_t vertex_count() const noexcept { return positions.size(); }
    std::size_t edge_count() const noexcept { return edges.size(); }

    /// Neighbours of v and the connecting edge ids (parallel spans).
    std::span<const VertexId> neighbours(VertexId v) const {
        return {adj_vertex_.data() + adj_offset_[v], adj_offset_[v + 1] - adj_offset_[v]};
    }
    std::span<const EdgeId> incident_edges(VertexId v) const {
        return {adj_edge_.data() + adj_offset_[v], adj_offset_[v + 1] - adj_offset_[v]};
    }
    std::size_t degree(VertexId v) const { return adj_offset_[v + 1] - adj_offset_[v]; }

    bool is_boundary(VertexId v) const { return boundary_flag_[v] != 0; }

    /// Distance from p to the patch boundary (infinite without a mask).
    double clearance(Vec2 p) const;

    /// Rebuilds adjacency and boundary flags after the public fields change.
    void finalize();

private:
    std::vector<std::uint32_t> adj_offset_{0};
    std::vector<VertexId> adj_vertex_;
    std::vector<EdgeId> adj_edge_;
    std::vector<std::uint8_t> boundary_flag_;
};

/// Graph on explicit data. `theta` defaults to pi/2 for every edge.
IsoradialGraph make_graph(std::vector<Vec2> positions, std::vector<Edge> edges, std::vector<double> theta = {},
                          std::vector<VertexId> boundary = {});

/// One colour class of a validated tiling. Edge ids follow rhombus ids.
/// Throws Error(Validation) if the tiling fails validate_tiling.
IsoradialGraph build_isoradial(std::shared_ptr<const RhombicTiling> tiling, int colour_class);
IsoradialGraph build_isoradial(const RhombicTiling& tiling, int colour_class);

/// The opposite colour class of the same tiling. Edge e of the result is the
/// dual of edge e of g. Throws Error(MissingSource) without a tiling.
IsoradialGraph dual_graph(const IsoradialGraph& g);

/// Vertices inside the closed box and the edges between them. Vertices with
/// a neighbour outside the box (or on the original boundary) form the new
/// boundary. The result keeps the mask but drops the tiling.
IsoradialGraph restrict_to_box(const IsoradialGraph& g, const OrientedBox& box);

enum class Model { Percolation, RandomCluster };

struct EdgeWeights {
    Model model = Model::Percolation;
    std::optional<double> q;
    double beta = 1.0;
    std::vector<double> p;
    std::vector<double> y;  // p / (1 - p)
};

/// p/(1-p) = beta sin((pi-theta)/3) / sin(theta/3).
double canonical_percolation_p(double theta, double beta = 1.0);
EdgeWeights percolation_weights(const IsoradialGraph& g, double beta);
/// Same probability on every edge; p may be 0 or 1.
EdgeWeights uniform_percolation_weights(std::size_t edge_count, double p);

enum class SigmaBranch { Trigonometric, Critical, Hyperbolic };

struct RcSigma {
    double sigma = 0.0;
    SigmaBranch branch = SigmaBranch::Trigonometric;
};

/// cos(sigma pi/2) = sqrt(q)/2 for q < 4, cosh(...) for q > 4, 0 at q = 4.
/// Throws Error(UnsupportedParameter) for q < 1.
RcSigma rc_sigma(double q);
/// Canonical random-cluster ratio y_e at beta = 1.
double canonical_rc_y(double theta, double q);
EdgeWeights rc_weights(const IsoradialGraph& g, double q, double beta);
/// Same p on every edge of a random-cluster model.
EdgeWeights uniform_rc_weights(std::size_t edge_count, double q, double p);

} // namespace isoperc
