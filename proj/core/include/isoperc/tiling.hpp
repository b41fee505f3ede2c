#pragma once

#include "isoperc/geometry.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace isoperc {

using VertexId = std::uint32_t;
using RhombusId = std::uint32_t;
inline constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

/// Vertex identification grid for tiling coordinates.
inline constexpr double kVertexQuantum = 1e-7;

/// Identifies the two grid lines whose crossing produced a multigrid rhombus.
/// Family/line `a` belongs to `Rhombus::dir_a`, `b` to `dir_b`.
struct GridTag {
    int family_a = 0;
    std::int64_t line_a = 0;
    int family_b = 0;
    std::int64_t line_b = 0;

    bool operator==(const GridTag&) const = default;
};

/// Unit rhombus base, base+a, base+a+b, base+b. Tilings keep every rhombus
/// counter-clockwise, i.e. cross(dir_a, dir_b) > 0.
struct Rhombus {
    Vec2 base;
    Vec2 dir_a;
    Vec2 dir_b;
    std::optional<GridTag> grid_tag;

    /// Checks the unit-side and non-parallel invariants and orients the
    /// rhombus counter-clockwise. Throws Error(InvalidParameter).
    static Rhombus make(Vec2 base, Vec2 dir_a, Vec2 dir_b, std::optional<GridTag> tag = std::nullopt);

    std::array<Vec2, 4> corners() const noexcept {
        return {base, base + dir_a, base + dir_a + dir_b, base + dir_b};
    }
    /// Interior angle at `base` (and at the opposite corner).
    double angle() const noexcept { return angle_between(dir_a, dir_b); }
    double area() const noexcept { return std::abs(cross(dir_a, dir_b)); }
    Vec2 center() const noexcept { return base + (dir_a + dir_b) * 0.5; }
};

/// Axis-aligned bounds of a generated patch.
struct Window {
    Vec2 lo;
    Vec2 hi;
};

/// Quantized vertex coordinate.
struct QuantKey {
    std::int64_t x = 0;
    std::int64_t y = 0;
    bool operator==(const QuantKey&) const = default;
};

struct QuantKeyHash {
    std::size_t operator()(const QuantKey& k) const noexcept {
        auto h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
        h ^= static_cast<std::uint64_t>(k.y) + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

/// One rhombus side as seen from a neighbouring rhombus.
struct SideLink {
    RhombusId rhombus = kNoId;
    std::uint8_t side = 0;
};

class RhombicTiling;
RhombicTiling hexagon_flip(const RhombicTiling& tiling, VertexId center);

/// Finite edge-to-edge patch of a rhombic tiling. Immutable once built.
///
/// Corner k of rhombus r is `corners(r)[k]`, counter-clockwise from the base.
/// Side k joins corner k to corner k+1 (mod 4); sides 0 and 2 are parallel to
/// dir_a, sides 1 and 3 to dir_b.
class RhombicTiling {
public:
    RhombicTiling() = default;

    /// Builds vertex identification, side adjacency and the 2-colouring.
    /// Rhombi with clockwise orientation are flipped to counter-clockwise;
    /// degenerate (parallel-sided) rhombi throw Error(InvalidParameter).
    /// Geometric defects (non-unit sides, overlaps, ...) are accepted here
    /// and reported by validate_tiling.
    static RhombicTiling from_rhombi(std::vector<Rhombus> rhombi);

    std::size_t size() const noexcept { return rhombi_.size(); }
    bool empty() const noexcept { return rhombi_.empty(); }

    const std::vector<Rhombus>& rhombi() const noexcept { return rhombi_; }
    const Rhombus& rhombus(RhombusId r) const { return rhombi_.at(r); }
    const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    const std::array<VertexId, 4>& corners(RhombusId r) const { return corners_.at(r); }

    /// Rhombi having `v` as a corner.
    std::span<const RhombusId> incident(VertexId v) const;
    /// Rhombus (and its side index) across side `side` of `r`, or kNoId.
    SideLink across(RhombusId r, int side) const { return across_.at(r)[side]; }

    /// 0/1 colouring from a breadth-first search rooted at the lowest vertex
    /// id of each component. Meaningful only when bipartite().
    int colour(VertexId v) const { return colour_.at(v); }
    bool bipartite() const noexcept { return bipartite_; }

    /// Sum of the interior angles of the incident rhombi at `v`.
    double angle_sum(VertexId v) const;
    /// A vertex is interior when its incident rhombi close up around it.
    bool is_interior(VertexId v) const;

    std::optional<VertexId> find_vertex(Vec2 p) const;
    const Window& window() const noexcept { return window_; }

    /// Number of rhombi using the side (u, v); 0 if it is not a side.
    int side_multiplicity(VertexId u, VertexId v) const;

private:
    friend RhombicTiling hexagon_flip(const RhombicTiling& tiling, VertexId center);

    std::vector<Rhombus> rhombi_;
    std::vector<Vec2> vertices_;
    std::vector<std::array<VertexId, 4>> corners_;
    std::vector<std::array<SideLink, 4>> across_;
    std::vector<std::uint32_t> incident_offset_;
    std::vector<RhombusId> incident_;
    std::vector<std::int8_t> colour_;
    bool bipartite_ = true;
    Window window_{};
    std::unordered_map<std::uint64_t, std::uint32_t> side_counts_;
    std::unordered_map<QuantKey, VertexId, QuantKeyHash> vertex_index_;
};

enum class PeriodicKind { Square, TriangularHexagonal, CustomAngle };

/// Periodic patches:
///  - Square: window_size x window_size unit squares.
///  - CustomAngle: window_size x window_size congruent rhombi with angle `angle`.
///  - TriangularHexagonal: lozenge tiling whose colour class 0 is the
///    triangular lattice (edge angle 2pi/3) over a window_size x window_size
///    parallelogram of lattice cells, and whose class 1 is the hexagonal lattice.
/// Throws Error(EmptyWindow) for window_size < 1, Error(InvalidAngle) for a
/// custom angle outside (0, pi).
RhombicTiling periodic_tiling(PeriodicKind kind, int window_size, double angle = std::numbers::pi / 2);

/// de Bruijn dual of a k-grid. Family j consists of the lines
/// <x, directions[j]> + offsets[j] in Z. Every crossing of two lines inside the
/// grid-space square of side 2*window_size/k (centred at the origin) yields
/// one rhombus, so the patch spans roughly window_size in tiling units.
/// Throws Error(InvalidDirections) for k < 2, non-unit or parallel directions;
/// Error(DegenerateOffsets) when three lines meet within 1e-9.
RhombicTiling multigrid_tiling(std::span<const Vec2> directions, std::span<const double> offsets,
                               double window_size);

/// Five-fold multigrid with directions 2*pi*j/5 and offsets summing to 1.
RhombicTiling penrose_tiling(double window_size);
std::vector<double> default_penrose_offsets();

struct Track {
    std::vector<RhombusId> rhombus_sequence;
    /// Side vector crossed by the track, normalised to angle in [0, pi).
    Vec2 transverse_direction;
    /// Grid family when the tiling came from a multigrid.
    std::optional<int> family;
    /// Only possible in invalid tilings.
    bool closed = false;
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool ok() const noexcept;
    const CheckResult* find(std::string_view name) const noexcept;
    std::vector<std::string> failures() const;
};

/// Checks unit sides, edge-to-edge (no side used thrice, opposite traversal,
/// no T-junctions), non-overlap, area balance, bipartiteness and the two
/// track conditions.
ValidationReport validate_tiling(const RhombicTiling& tiling);

/// Tracks of a tiling that passes validate_tiling; throws Error(Validation)
/// otherwise. Each rhombus lies on exactly two tracks.
std::vector<Track> extract_tracks(const RhombicTiling& tiling);

/// min over rhombi of min(angle, pi - angle). Throws Error(EmptyWindow).
double bap_epsilon(const RhombicTiling& tiling);

/// True when exactly three rhombi meet at `v` and close up around it.
bool is_flippable(const RhombicTiling& tiling, VertexId v);
std::vector<VertexId> flippable_vertices(const RhombicTiling& tiling);

/// Re-tiles the hexagon formed by the three rhombi around `center` the other
/// way. The three replaced rhombi keep their indices and grid tags; every
/// other rhombus is untouched and surviving vertices keep their colour.
/// Throws Error(NotFlippable).
RhombicTiling hexagon_flip(const RhombicTiling& tiling, VertexId center);

/// Same rhombi as point sets, up to ordering, at the vertex quantum.
bool same_geometry(const RhombicTiling& a, const RhombicTiling& b);

} // namespace isoperc
