#pragma once

#include "isoperc/isoradial.hpp"
#include "isoperc/rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace isoperc {

/// Parameters of the triangle ABC. Entry i belongs to the triangle edge
/// opposite vertex i (A=0, B=1, C=2); the star arm O-i carries 1 - p_i
/// (percolation) or q / y_i (random-cluster).
struct TriangleParams {
    Model model = Model::Percolation;
    std::array<double, 3> values{};
    double q = 1.0;

    static TriangleParams percolation(double p0, double p1, double p2);
    static TriangleParams random_cluster(double y0, double y1, double y2, double q);

    /// Canonical weights of a triangle whose edge angles sum to 2 pi.
    static TriangleParams canonical_percolation(const std::array<double, 3>& theta);
    static TriangleParams canonical_random_cluster(const std::array<double, 3>& theta, double q);
};

enum class Shape { Triangle, Star };

/// Probabilities of {A|B|C}, {AB|C}, {AC|B}, {BC|A}, {ABC}, in this order.
using PartitionLaw = std::array<double, 5>;

/// Edge bits of a triangle: bit 0 = BC, bit 1 = AC, bit 2 = AB (the edge
/// opposite A, B, C). Star bits: bit i = arm O-i.
int triangle_partition(unsigned bits);
int star_partition(unsigned bits);

double kappa(double p0, double p1, double p2);
double psi(double y0, double y1, double y2, double q);
/// kappa or psi of the params, whichever applies.
double solvability_residual(const TriangleParams& params);

/// Probability of each of the 8 edge configurations of the shape.
std::array<double, 8> configuration_law(Shape shape, const TriangleParams& params);
PartitionLaw partition_law(Shape shape, const TriangleParams& params);

struct EquivalenceReport {
    double residual = 0.0;
    PartitionLaw law_triangle{};
    PartitionLaw law_star{};
    double max_abs_diff = 0.0;
    /// The two laws agree within the tolerance.
    bool pass = false;
    /// Laws agree exactly when the residual vanishes (within 1e-9).
    bool consistent = false;
};

EquivalenceReport verify_equivalence(const TriangleParams& params, double tolerance = 1e-12);

enum class Direction { TriangleToStar, StarToTriangle };

/// Markov kernel from source-shape configurations to target-shape
/// configurations that keeps the induced partition of {A,B,C}. Built for
/// solvable percolation params and checked by enumeration on construction.
class CouplingKernel {
public:
    /// Throws Error(NotSolvable) when |kappa| > 1e-9 or the kernel fails its
    /// enumeration check; Error(WrongModel) for random-cluster params.
    CouplingKernel(const TriangleParams& params, Direction direction);

    double probability(unsigned from, unsigned to) const { return k_[from][to]; }
    /// True when the partition of `from` does not determine the output.
    bool needs_randomness(unsigned from) const { return random_[from]; }
    unsigned sample(unsigned from, Rng& rng) const;

    /// max over target configurations of |source law pushed through K - target law|.
    double pushforward_residual() const { return residual_; }
    Direction direction() const noexcept { return direction_; }

private:
    std::array<std::array<double, 8>, 8> k_{};
    std::array<bool, 8> random_{};
    double residual_ = 0.0;
    Direction direction_;
};

unsigned couple_triangle_star(unsigned bits, Direction direction, const TriangleParams& params, Rng& rng);

struct SwitchResult {
    IsoradialGraph graph;
    EdgeWeights weights;
    std::vector<std::uint8_t> open;
    Direction direction = Direction::TriangleToStar;
};

/// Flips the hexagon around tiling vertex `center`, rebuilds the graph and its
/// canonical weights, and carries the configuration across with the coupling.
/// Edge e of the result comes from the same rhombus as edge e of g.
/// Throws Error(NotFlippable), Error(MissingSource) without a tiling, and
/// Error(InvalidParameter) unless weights are canonical percolation (beta 1).
SwitchResult apply_switch(const IsoradialGraph& g, const EdgeWeights& weights,
                          const std::vector<std::uint8_t>& open, VertexId center, Rng& rng);

} // namespace isoperc
