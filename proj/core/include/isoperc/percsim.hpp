#pragma once

#include "isoperc/geometry.hpp"
#include "isoperc/isoradial.hpp"
#include "isoperc/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isoperc {

/// Distance kept between any measurement and the patch boundary: two rhombus
/// diameters.
inline constexpr double kBoundaryMargin = 4.0;

struct Configuration {
    std::vector<std::uint8_t> open;
    std::uint64_t seed = 0;
    std::string graph_id;
    std::string weights_id;

    std::size_t open_count() const noexcept;
};

/// Edge e is open when a fresh uniform falls below p_e. Throws
/// Error(WrongModel) for random-cluster weights.
Configuration sample_configuration(const EdgeWeights& weights, Rng& rng);
/// Same draw into a caller-owned buffer.
void sample_open(const EdgeWeights& weights, Rng& rng, std::vector<std::uint8_t>& open);

struct ClusterDecomposition {
    std::vector<std::uint32_t> label;  // compact, numbered by lowest vertex
    std::vector<std::uint32_t> size;
    std::vector<Vec2> lo;              // per-cluster bounding box
    std::vector<Vec2> hi;

    std::size_t count() const noexcept { return size.size(); }
    std::uint32_t largest() const noexcept;
};

/// Union-find labelling of open clusters. Throws Error(Shape) on a size mismatch.
ClusterDecomposition cluster_decomposition(const IsoradialGraph& g, const std::vector<std::uint8_t>& open);

/// max over y in C_v of the sup-norm of y - v.
double cluster_radius(const IsoradialGraph& g, const ClusterDecomposition& d, VertexId v);

struct RunOptions {
    std::uint64_t seed = 0;
    unsigned threads = 0;       // 0: all available cores
    std::size_t batches = 200;  // batch means kept for resampling
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

struct ObservableCurve {
    std::vector<double> abscissa;
    std::vector<double> estimate;
    std::vector<double> std_error;
    std::vector<std::size_t> samples;
    /// Per abscissa: means over consecutive blocks of samples.
    std::vector<std::vector<double>> batch_means;
};

enum class CrossingDirection { Horizontal, Vertical };

/// Crossing between the box's Left and Right sides (Horizontal) or Bottom and
/// Top (Vertical), all in the box's own frame.
struct CrossingSpec {
    OrientedBox box;
    CrossingDirection direction = CrossingDirection::Horizontal;
};

/// A box whose corners are vertices of the square lattice built from colour
/// class 0 of periodic_tiling(Square): `rows` x `cols` lattice vertices, the
/// lattice rows running along the box's x-axis. The lower-left corner is the
/// lattice vertex nearest to where it would sit for a box centred at `near`.
OrientedBox square_lattice_box(Vec2 near, int rows, int cols);

/// Box-restricted crossing event, precomputed once per (graph, spec).
/// Vertices inside the closed box span the usable edges. A vertex lying on a
/// crossing side touches it; an open edge leaving the box through a crossing
/// side joins its inner end to that side. Such leaving edges count among the
/// box edges.
class BoxCrossing {
public:
    BoxCrossing(const IsoradialGraph& g, const CrossingSpec& spec);

    std::size_t edge_count() const noexcept { return edges_.size(); }
    /// Graph edge id of box edge k.
    EdgeId graph_edge(std::size_t k) const { return edges_[k]; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    /// Vertices lying on the side.
    std::size_t terminal_count(bool first_side) const;

    /// `open[k]` refers to box edge k.
    bool crosses(const std::vector<std::uint8_t>& open) const;
    /// `open[e]` refers to graph edge e.
    bool crosses_graph(const std::vector<std::uint8_t>& open) const;

private:
    std::vector<VertexId> vertices_;
    std::vector<EdgeId> edges_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges_;
    std::vector<std::uint8_t> side_;  // bit 0: first side, bit 1: second side
};

/// Monte Carlo crossing probability. The box must sit at least
/// kBoundaryMargin inside the patch (Error(Geometry) otherwise).
Estimate crossing_probability(const IsoradialGraph& g, const EdgeWeights& weights, const CrossingSpec& spec,
                              std::size_t samples, const RunOptions& options);

/// Crossing indicators for several weight tables driven by the same uniforms:
/// result[w][s] for weights w and sample s.
std::vector<std::vector<std::uint8_t>> coupled_crossings(const IsoradialGraph& g,
                                                         const std::vector<EdgeWeights>& weights,
                                                         const CrossingSpec& spec, std::size_t samples,
                                                         const RunOptions& options);

/// Exact crossing probability by enumerating the box edges (at most 24).
double exact_crossing_probability(const IsoradialGraph& g, const EdgeWeights& weights, const CrossingSpec& spec);

/// Vertices at least `clearance` inside the patch.
std::vector<VertexId> interior_vertices(const IsoradialGraph& g, double clearance);

/// P(rad(C_v) >= k), averaged over interior vertices and samples.
ObservableCurve one_arm_curve(const IsoradialGraph& g, const EdgeWeights& weights, const std::vector<double>& radii,
                              std::size_t samples, const RunOptions& options);
/// P(|C_v| >= n).
ObservableCurve volume_tail_curve(const IsoradialGraph& g, const EdgeWeights& weights,
                                  const std::vector<double>& sizes, std::size_t samples, const RunOptions& options);
/// P(v <-> w) with w the vertex nearest to v + d * direction.
ObservableCurve two_point_curve(const IsoradialGraph& g, const EdgeWeights& weights,
                                const std::vector<double>& distances, std::size_t samples,
                                const RunOptions& options, Vec2 direction = {1.0, 0.0});

/// Nearest-vertex queries on an isoradial graph (every point of the patch lies
/// within distance 1 of a vertex).
class VertexLocator {
public:
    explicit VertexLocator(const IsoradialGraph& g);
    std::optional<VertexId> nearest(Vec2 p) const;

private:
    const IsoradialGraph* g_;
    Vec2 origin_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::uint32_t> offset_;
    std::vector<VertexId> items_;
};

struct ScanRow {
    double beta = 0.0;
    Estimate theta;            // P(rad(C_v) >= L/4)
    Estimate chi_finite;       // E|C_v| over clusters with rad < L/4
    Estimate largest_fraction; // largest cluster / |V|
    Estimate spanning;         // horizontal crossing of the central L/2 box
    Estimate clusters_per_vertex;
};

/// Canonical percolation at each beta with shared uniforms, so every
/// observable is driven by one monotone coupling across the grid.
std::vector<ScanRow> near_critical_scan(const IsoradialGraph& g, const std::vector<double>& beta_grid,
                                        std::size_t samples, const RunOptions& options);

/// Side length of the patch (the shorter side of its bounding window).
double patch_scale(const IsoradialGraph& g);

struct SpacetimeSpec {
    double alpha = 0.0;  // tilt of the square
    double side = 1.0;
    Vec2 center{0.0, 0.0};
};

/// Continuum percolation on Z x R: vertical lines x = i cut at rate 1,
/// neighbouring lines joined by bridges at rate 1. Estimates the probability
/// of a Left-Right crossing of the tilted square.
Estimate spacetime_crossing(const SpacetimeSpec& spec, std::size_t samples, const RunOptions& options);
/// One sample of the same event.
bool spacetime_crossing_sample(const SpacetimeSpec& spec, Rng& rng);

/// Mean and standard error of a sequence of per-sample values.
Estimate summarize(const std::vector<double>& values);
/// Means of `batches` consecutive blocks (fewer when there are fewer values).
std::vector<double> batch_means(const std::vector<double>& values, std::size_t batches);

} // namespace isoperc
