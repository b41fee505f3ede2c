#pragma once

#include "isoperc/isoradial.hpp"
#include "isoperc/tiling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isoperc::tools {

struct SvgStyle {
    double scale = 20.0;  // pixels per unit
    bool tracks = false;
    bool vertices = false;
    std::vector<std::string> palette;  // empty: built-in palette
    std::string rhombus_fill = "#f4f1e8";
    std::string stroke = "#555555";
};

/// Rhombi as polygons; with style.tracks one polyline per track through the
/// midpoints of the sides it crosses.
std::string render_tiling_svg(const RhombicTiling& tiling, const SvgStyle& style = {});

/// Graph edges as lines (all of class "edge").
std::string render_graph_svg(const IsoradialGraph& g, const SvgStyle& style = {});

/// Open edges coloured by cluster label (class "edge open"), closed edges
/// faint (class "edge closed").
std::string render_configuration_svg(const IsoradialGraph& g, const std::vector<std::uint8_t>& open,
                                     const SvgStyle& style = {});

} // namespace isoperc::tools
