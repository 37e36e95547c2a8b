#pragma once
// Static SVG rendering of a laid-out snapshot: one line per edge, one circle
// per node, edges before nodes, both in id order. Numbers are written with
// fixed precision so identical inputs produce identical bytes.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "triarch/csv.hpp"
#include "triarch/graph.hpp"
#include "triarch/quadtree.hpp"

namespace triarch {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out.push_back(c);
    }
    return out;
}

inline const char* stance_color(Stance s) {
    switch (s) {
        case Stance::Anti:    return "#d62728";
        case Stance::Pro:     return "#1f77b4";
        case Stance::Neutral: return "#2ca02c";
    }
    return "#999999";
}

// Distinct fills for the 12 neutral sub-areas (anti/pro keep the stance reds
// and blues, mirroring the figures' category coloring).
inline const char* subcategory_color(NeutralSubcategory c) {
    static const char* palette[kSubcategoryCount] = {
        "#2ca02c", "#98df8a", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
        "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#7f7f7f"};
    return palette[static_cast<std::size_t>(c)];
}

struct SvgOptions {
    bool color_by_subcategory = false;  // neutral nodes keyed by sub-area
    double margin = 20.0;
    const char* edge_color = "#cccccc";
    double edge_width = 0.4;
};

inline void write_svg(std::ostream& out, const Snapshot& s, std::span<const Vec2> positions,
                      std::span<const double> radii, const SvgOptions& opts = {}) {
    auto fmt = [](double v) { return format_fixed(v, 3); };

    double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double r = radii.empty() ? 4.0 : radii[i];
        lo_x = std::min(lo_x, positions[i].x - r);
        hi_x = std::max(hi_x, positions[i].x + r);
        lo_y = std::min(lo_y, positions[i].y - r);
        hi_y = std::max(hi_y, positions[i].y + r);
    }
    const double m = opts.margin;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(lo_x - m) << " "
        << fmt(lo_y - m) << " " << fmt(hi_x - lo_x + 2 * m) << " " << fmt(hi_y - lo_y + 2 * m)
        << "\">\n";

    for (auto [u, v] : s.edges()) {
        out << "  <line x1=\"" << fmt(positions[u].x) << "\" y1=\"" << fmt(positions[u].y)
            << "\" x2=\"" << fmt(positions[v].x) << "\" y2=\"" << fmt(positions[v].y)
            << "\" stroke=\"" << opts.edge_color << "\" stroke-width=\""
            << format_fixed(opts.edge_width, 2) << "\"/>\n";
    }
    for (NodeIndex i = 0; i < s.node_count(); ++i) {
        const PageNode& n = s.node(i);
        const char* fill = stance_color(n.stance);
        if (opts.color_by_subcategory && n.stance == Stance::Neutral && n.subcategory)
            fill = subcategory_color(*n.subcategory);
        const double r = radii.empty() ? 4.0 : radii[i];
        out << "  <circle cx=\"" << fmt(positions[i].x) << "\" cy=\"" << fmt(positions[i].y)
            << "\" r=\"" << fmt(r) << "\" fill=\"" << fill << "\"><title>"
            << xml_escape(n.id) << "</title></circle>\n";
    }
    out << "</svg>\n";
}

}  // namespace triarch
