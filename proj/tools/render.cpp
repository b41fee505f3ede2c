#include "render.hpp"

#include "isoperc/error.hpp"
#include "isoperc/percsim.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace isoperc::tools {

namespace {

const std::vector<std::string> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                        "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

class Canvas {
public:
    Canvas(const std::vector<Vec2>& points, const SvgStyle& style) : scale_(style.scale) {
        if (points.empty()) throw Error(ErrorKind::EmptyWindow, "nothing to render");
        lo_ = hi_ = points.front();
        for (Vec2 p : points) {
            lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
            hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
        }
        lo_ = lo_ - Vec2{1, 1};
        hi_ = hi_ + Vec2{1, 1};
        const double w = (hi_.x - lo_.x) * scale_, h = (hi_.y - lo_.y) * scale_;
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
               "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(w) + "\" height=\"" +
               num(h) + "\" viewBox=\"0 0 " + num(w) + " " + num(h) + "\">\n";
    }

    // y grows upwards in the plane and downwards in SVG
    std::string x(Vec2 p) const { return num((p.x - lo_.x) * scale_); }
    std::string y(Vec2 p) const { return num((hi_.y - p.y) * scale_); }
    std::string point(Vec2 p) const { return x(p) + "," + y(p); }

    void line(Vec2 a, Vec2 b, const std::string& cls, const std::string& stroke, double width) {
        out_ += "<line class=\"" + cls + "\" x1=\"" + x(a) + "\" y1=\"" + y(a) + "\" x2=\"" + x(b) + "\" y2=\"" + y(b) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
    }
    void raw(const std::string& s) { out_ += s; }
    std::string finish() { return out_ + "</svg>\n"; }
    double scale() const { return scale_; }

private:
    double scale_;
    Vec2 lo_, hi_;
    std::string out_;
};

const std::string& colour(const SvgStyle& style, std::size_t k) {
    const auto& p = style.palette.empty() ? kPalette : style.palette;
    return p[k % p.size()];
}

void draw_vertices(Canvas& c, const std::vector<Vec2>& pts, const SvgStyle& style) {
    if (!style.vertices) return;
    for (Vec2 p : pts)
        c.raw("<circle class=\"vertex\" cx=\"" + c.x(p) + "\" cy=\"" + c.y(p) + "\" r=\"" + num(0.08 * c.scale()) +
              "\" fill=\"" + style.stroke + "\"/>\n");
}

} // namespace

std::string render_tiling_svg(const RhombicTiling& tiling, const SvgStyle& style) {
    Canvas c(tiling.vertices(), style);
    c.raw("<g class=\"rhombi\">\n");
    for (RhombusId r = 0; r < tiling.size(); ++r) {
        std::string pts;
        for (VertexId v : tiling.corners(r)) pts += (pts.empty() ? "" : " ") + c.point(tiling.vertices()[v]);
        c.raw("<polygon class=\"rhombus\" points=\"" + pts + "\" fill=\"" + style.rhombus_fill + "\" stroke=\"" +
              style.stroke + "\" stroke-width=\"" + num(0.03 * style.scale) + "\"/>\n");
    }
    c.raw("</g>\n");
    if (style.tracks) {
        c.raw("<g class=\"tracks\">\n");
        const auto tracks = extract_tracks(tiling);
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            std::string pts;
            for (RhombusId r : tracks[t].rhombus_sequence)
                pts += (pts.empty() ? "" : " ") + c.point(tiling.rhombus(r).center());
            c.raw("<polyline class=\"track\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + colour(style, t) +
                  "\" stroke-width=\"" + num(0.06 * style.scale) + "\"/>\n");
        }
        c.raw("</g>\n");
    }
    draw_vertices(c, tiling.vertices(), style);
    return c.finish();
}

std::string render_graph_svg(const IsoradialGraph& g, const SvgStyle& style) {
    Canvas c(g.positions, style);
    for (const auto& e : g.edges) c.line(g.positions[e.u], g.positions[e.v], "edge", style.stroke, 0.04 * style.scale);
    draw_vertices(c, g.positions, style);
    return c.finish();
}

std::string render_configuration_svg(const IsoradialGraph& g, const std::vector<std::uint8_t>& open,
                                     const SvgStyle& style) {
    const auto d = cluster_decomposition(g, open);
    Canvas c(g.positions, style);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Vec2 a = g.positions[g.edges[e].u], b = g.positions[g.edges[e].v];
        if (open[e]) c.line(a, b, "edge open", colour(style, d.label[g.edges[e].u]), 0.08 * style.scale);
        else c.line(a, b, "edge closed", "#dddddd", 0.02 * style.scale);
    }
    draw_vertices(c, g.positions, style);
    return c.finish();
}

} // namespace isoperc::tools
