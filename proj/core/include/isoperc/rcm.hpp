#pragma once

#include "isoperc/analysis.hpp"
#include "isoperc/isoradial.hpp"
#include "isoperc/percsim.hpp"
#include "isoperc/rng.hpp"

#include <cstdint>
#include <vector>

namespace isoperc {

enum class BoundaryKind { Free, Wired, Explicit };

/// Free: boundary vertices count separately. Wired: all boundary vertices are
/// identified. Explicit: each block of the partition is identified.
struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::Free;
    std::vector<std::vector<VertexId>> blocks;

    static BoundaryCondition free() { return {}; }
    static BoundaryCondition wired() { return {BoundaryKind::Wired, {}}; }
    static BoundaryCondition partition(std::vector<std::vector<VertexId>> blocks) {
        return {BoundaryKind::Explicit, std::move(blocks)};
    }
};

struct RCParams {
    double q = 1.0;
    double beta = 1.0;
    std::vector<double> p;

    /// From random-cluster edge weights (Error(WrongModel) otherwise).
    static RCParams from_weights(const EdgeWeights& weights);
    static RCParams uniform(std::size_t edge_count, double p, double q);
    double y(EdgeId e) const { return p[e] / (1 - p[e]); }
};

/// Throws Error(UnsupportedParameter) for q < 1, Error(InvalidParameter) for
/// p outside (0, 1), Error(Shape) on a size mismatch, Error(Validation) when
/// an explicit partition does not cover the boundary exactly once.
void validate_rc(const IsoradialGraph& g, const RCParams& params, const BoundaryCondition& b);

/// Open clusters after merging boundary vertices according to b.
std::size_t boundary_cluster_count(const IsoradialGraph& g, const std::vector<std::uint8_t>& open,
                                   const BoundaryCondition& b);

/// sum_open log p + sum_closed log(1 - p) + k_b log q.
double rc_log_weight(const IsoradialGraph& g, const std::vector<std::uint8_t>& open, const RCParams& params,
                     const BoundaryCondition& b);

/// Index bit e is the state of edge e.
std::vector<std::uint8_t> config_from_index(std::uint64_t index, std::size_t edge_count);
std::uint64_t config_index(const std::vector<std::uint8_t>& open);

/// Probability of every configuration, by enumeration (at most 24 edges,
/// Error(Size) otherwise).
std::vector<double> exact_rc_distribution(const IsoradialGraph& g, const RCParams& params,
                                          const BoundaryCondition& b);

enum class Connectivity {
    Search,     // breadth-first searches grown alternately from both endpoints
    UnionFind,  // fresh union-find over every other open edge
};

/// Single-edge heat-bath chain. Edge e is resampled open with probability
/// p / (p + (1 - p) q^{1 - kappa}), kappa = 1 when its endpoints are joined
/// off e (boundary merged per b). One uniform is consumed per update, and the
/// update is monotone in the state and in p, so chains sharing uniforms stay
/// ordered.
class HeatBath {
public:
    HeatBath(const IsoradialGraph& g, RCParams params, BoundaryCondition b,
             Connectivity method = Connectivity::Search);

    void set_state(std::vector<std::uint8_t> open);
    void fill(bool open);
    const std::vector<std::uint8_t>& state() const noexcept { return open_; }

    bool connected_off(EdgeId e);
    double open_probability(EdgeId e);
    void update(EdgeId e, double u);
    /// One update per edge in id order.
    void sweep(Rng& rng);

    const IsoradialGraph& graph() const noexcept { return *g_; }
    const RCParams& params() const noexcept { return params_; }

private:
    bool search(EdgeId e);
    bool union_find(EdgeId e);

    const IsoradialGraph* g_;
    RCParams params_;
    Connectivity method_;
    std::vector<double> p_free_;  // open probability when kappa = 0
    std::vector<std::uint8_t> open_;
    // nodes: graph vertices, then one ghost per identified boundary block
    std::size_t nodes_ = 0;
    std::vector<std::uint32_t> offset_;
    std::vector<std::uint32_t> target_;
    std::vector<EdgeId> via_;  // graph edge, or kNoId for a boundary link
    std::vector<std::uint32_t> mark_;
    std::uint32_t stamp_ = 0;
    std::vector<std::uint32_t> queue_[2];
};

enum class ChainStart { Closed, Open };

/// A chain run for `sweeps` sweeps from the given start.
Configuration rc_heat_bath_sample(const IsoradialGraph& g, const RCParams& params, const BoundaryCondition& b,
                                  std::size_t sweeps, Rng& rng, ChainStart start = ChainStart::Closed);

/// Distribution after applying the update of edge e to `dist` (indexed as in
/// exact_rc_distribution), using the chain's own conditional probabilities.
std::vector<double> apply_heat_bath_update(HeatBath& chain, EdgeId e, const std::vector<double>& dist);

struct ChainOptions {
    std::size_t burn_in = 200;      // sweeps before the first measurement
    std::size_t measurements = 10;  // per chain
    std::size_t spacing = 2;        // sweeps between measurements
};

struct RcScanRow {
    double p = 0.0;
    Estimate crossing;       // both starts pooled
    Estimate open_start;
    Estimate closed_start;
    double start_gap = 0.0;  // |open - closed| in combined standard errors
};

struct RcScan {
    std::vector<RcScanRow> rows;
    bool monotone = false;
    double steepest_rise = 0.0;
    double max_start_gap = 0.0;
    std::size_t sweeps_per_chain = 0;
};

/// Crossing probability at each p (uniform on every edge). Replica r runs an
/// open-start and a closed-start chain at every p from the same stream, so the
/// curve is monotone in p sample by sample. `replicas` independent chain
/// pairs per point.
RcScan rc_crossing_scan(const IsoradialGraph& g, double q, const std::vector<double>& p_grid,
                        const BoundaryCondition& b, const CrossingSpec& spec, std::size_t replicas,
                        const ChainOptions& chain, const RunOptions& options);

/// Location of the largest slope of a curve sampled on an increasing grid,
/// refined by a parabola through the three slopes around the maximum.
double steepest_rise(const std::vector<double>& x, const std::vector<double>& y);

/// y1 y2 - q with y_i = p_i / (1 - p_i).
double critical_surface_residual(double p1, double p2, double q);

/// sqrt(q) / (1 + sqrt(q)).
double rc_critical_p(double q);

struct RcDecay {
    ObservableCurve curve;
    ExponentFit exponential;
    ExponentFit power;
    bool exponential_preferred = false;  // smaller residual on the same window
};

/// Two-point function under the free measure with canonical weights at beta,
/// averaged over interior source vertices and equilibrated chains. Requires
/// q >= 4 and beta < 1 (Error(OutOfRegime)) unless `enforce_regime` is false.
/// Fits use the distances from the third onward with clearly positive estimates.
RcDecay rc_two_point_decay(const IsoradialGraph& g, double q, double beta, const std::vector<double>& distances,
                           std::size_t replicas, const ChainOptions& chain, const RunOptions& options,
                           bool enforce_regime = true, Vec2 direction = {1.0, 0.0});

} // namespace isoperc
