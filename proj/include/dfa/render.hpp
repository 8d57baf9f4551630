#pragma once

// Deterministic force-directed layouts and SVG snapshots of daily graphs.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dfa/categories.hpp"
#include "dfa/common.hpp"
#include "dfa/graph.hpp"

namespace dfa {

struct LayoutParams {
    int iterations = 300;
    double edge_scale = 0.3;  // ideal edge length k = edge_scale * sqrt(1 / n)
    double temperature = 0.1;  // initial maximum step, cooled linearly to 0
};

struct LayoutResult {
    std::vector<std::pair<double, double>> positions;  // per node index, in [0,1]^2
    std::uint64_t seed = 0;
    int iterations = 0;
};

// Fruchterman-Reingold in the unit square. Nodes are updated one at a time in
// ascending index order, so the result depends only on (graph, seed, params).
inline LayoutResult layout(const DailyGraph& g, std::uint64_t seed, const LayoutParams& params = {}) {
    if (params.iterations < 0) throw ConfigError("layout: iterations must be non-negative");
    if (!(params.edge_scale > 0.0) || !(params.temperature >= 0.0)) throw ConfigError("layout: invalid constants");
    LayoutResult out;
    out.seed = seed;
    out.iterations = params.iterations;
    const std::size_t n = g.nodes.size();
    if (n == 0) return out;
    Rng rng(seed);
    auto& pos = out.positions;
    pos.resize(n);
    for (auto& p : pos) {
        p.first = rng.uniform();
        p.second = rng.uniform();
    }
    if (n == 1) {
        pos[0] = {0.5, 0.5};
        return out;
    }
    const auto adj = adjacency(n, simple_edges(g));
    const double k = params.edge_scale * std::sqrt(1.0 / static_cast<double>(n));
    const double k2 = k * k;
    for (int it = 0; it < params.iterations; ++it) {
        const double t = params.temperature * (1.0 - static_cast<double>(it) / static_cast<double>(params.iterations));
        for (std::size_t v = 0; v < n; ++v) {
            double dx = 0.0, dy = 0.0;
            for (std::size_t u = 0; u < n; ++u) {
                if (u == v) continue;
                double ex = pos[v].first - pos[u].first;
                double ey = pos[v].second - pos[u].second;
                double d2 = ex * ex + ey * ey;
                if (d2 < 1e-18) {
                    // Coincident points: push apart along a fixed direction.
                    ex = v < u ? -1e-9 : 1e-9;
                    ey = 0.0;
                    d2 = 1e-18;
                }
                const double f = k2 / d2;  // (k^2 / d) along the unit vector
                dx += ex * f;
                dy += ey * f;
            }
            for (auto u : adj[v]) {
                const double ex = pos[v].first - pos[u].first;
                const double ey = pos[v].second - pos[u].second;
                const double d = std::sqrt(ex * ex + ey * ey);
                const double f = d / k;  // (d^2 / k) along the unit vector
                dx -= ex * f;
                dy -= ey * f;
            }
            const double len = std::sqrt(dx * dx + dy * dy);
            if (len > 0.0) {
                const double step = std::min(len, t) / len;
                pos[v].first = std::clamp(pos[v].first + dx * step, 0.0, 1.0);
                pos[v].second = std::clamp(pos[v].second + dy * step, 0.0, 1.0);
            }
        }
    }
    // Center the bounding box.
    double lo_x = 1.0, hi_x = 0.0, lo_y = 1.0, hi_y = 0.0;
    for (const auto& [x, y] : pos) {
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
    }
    const double sx = 0.5 - (lo_x + hi_x) / 2.0, sy = 0.5 - (lo_y + hi_y) / 2.0;
    for (auto& [x, y] : pos) {
        x = std::clamp(x + sx, 0.0, 1.0);
        y = std::clamp(y + sy, 0.0, 1.0);
    }
    return out;
}

struct RenderStyle {
    int canvas = 1000;
    double margin = 40.0;
    double sender_radius = 6.0;
    double receiver_radius = 4.0;
    double edge_width = 0.6;
    std::string edge_color = "#999999";
    std::string receiver_color = kReceiverColor;
    std::map<std::string, std::string> colors;  // category -> "#rrggbb"
    LayoutParams layout;

    static RenderStyle from_categories(const CategorySet& categories) {
        RenderStyle s;
        for (const auto& c : categories) s.colors[c.label] = c.color;
        return s;
    }

    void validate() const {
        if (canvas < 100) throw ConfigError("render: canvas must be at least 100 pixels");
        if (!(margin >= 0.0 && margin * 2 < canvas)) throw ConfigError("render: margin out of range");
        if (!(sender_radius > 0.0 && receiver_radius > 0.0 && edge_width > 0.0)) {
            throw ConfigError("render: radii and edge width must be positive");
        }
        std::set<std::string> seen;
        for (const auto& [cat, color] : colors) {
            if (!seen.insert(color).second) throw ConfigError("render: color " + color + " assigned to two categories");
        }
    }
};

// Overrides from a style JSON object: canvas, margin, sender_radius,
// receiver_radius, edge_width, edge_color, receiver_color, colors{},
// layout{iterations, edge_scale, temperature}.
inline RenderStyle style_from_json(const nlohmann::json& j, const CategorySet& categories) {
    auto s = RenderStyle::from_categories(categories);
    try {
        s.canvas = j.value("canvas", s.canvas);
        s.margin = j.value("margin", s.margin);
        s.sender_radius = j.value("sender_radius", s.sender_radius);
        s.receiver_radius = j.value("receiver_radius", s.receiver_radius);
        s.edge_width = j.value("edge_width", s.edge_width);
        s.edge_color = j.value("edge_color", s.edge_color);
        s.receiver_color = j.value("receiver_color", s.receiver_color);
        if (j.contains("colors")) {
            for (const auto& [cat, color] : j.at("colors").get<std::map<std::string, std::string>>()) s.colors[cat] = color;
        }
        if (j.contains("layout")) {
            const auto& l = j.at("layout");
            s.layout.iterations = l.value("iterations", s.layout.iterations);
            s.layout.edge_scale = l.value("edge_scale", s.layout.edge_scale);
            s.layout.temperature = l.value("temperature", s.layout.temperature);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid render style: ") + e.what());
    }
    s.validate();
    return s;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string caption(const DailyGraph& g) {
    std::string text = format_day(g.day);
    if (!g.area.empty() || !g.event.empty()) text += "  " + g.area + " / " + g.event;
    return text;
}

}  // namespace detail

// Panel contents (edges, nodes, caption) without the outer <svg> element.
inline std::string snapshot_body(const DailyGraph& g, const LayoutResult& lay, const RenderStyle& style) {
    if (lay.positions.size() != g.nodes.size()) throw std::invalid_argument("snapshot: layout does not cover the graph");
    std::vector<std::string> fill(g.nodes.size(), style.receiver_color);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        if (!g.nodes[i].is_sender()) continue;
        auto it = style.colors.find(g.nodes[i].category);
        if (it == style.colors.end()) throw ConfigError("render: no color for category '" + g.nodes[i].category + "'");
        fill[i] = it->second;
    }
    const double span = style.canvas - 2 * style.margin;
    auto px = [&](double v) { return fixed(style.margin + v * span); };
    std::ostringstream out;
    out << "<rect x=\"0\" y=\"0\" width=\"" << style.canvas << "\" height=\"" << style.canvas
        << "\" fill=\"#ffffff\" stroke=\"#cccccc\"/>\n";
    out << "<g stroke=\"" << style.edge_color << "\" stroke-width=\"" << fixed(style.edge_width) << "\">\n";
    for (const auto& e : simple_edges(g)) {
        const auto& a = lay.positions[e.first];
        const auto& b = lay.positions[e.second];
        out << "<line x1=\"" << px(a.first) << "\" y1=\"" << px(a.second) << "\" x2=\"" << px(b.first) << "\" y2=\""
            << px(b.second) << "\"/>\n";
    }
    out << "</g>\n<g stroke=\"none\">\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& p = lay.positions[i];
        const double r = g.nodes[i].is_sender() ? style.sender_radius : style.receiver_radius;
        out << "<circle cx=\"" << px(p.first) << "\" cy=\"" << px(p.second) << "\" r=\"" << fixed(r) << "\" fill=\""
            << fill[i] << "\"><title>" << detail::xml_escape(g.nodes[i].user_id) << "</title></circle>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << fixed(style.margin / 2) << "\" y=\"" << fixed(style.margin * 0.75)
        << "\" font-family=\"sans-serif\" font-size=\"20\">" << detail::xml_escape(detail::caption(g)) << "</text>\n";
    return out.str();
}

inline std::string emit_snapshot(const DailyGraph& g, const LayoutResult& lay, const RenderStyle& style) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.canvas << "\" height=\""
        << style.canvas << "\" viewBox=\"0 0 " << style.canvas << ' ' << style.canvas << "\">\n";
    out << snapshot_body(g, lay, style);
    out << "</svg>\n";
    return out.str();
}

// Graphviz variant with pinned positions in inches.
inline std::string emit_dot(const DailyGraph& g, const LayoutResult& lay, const RenderStyle& style) {
    if (lay.positions.size() != g.nodes.size()) throw std::invalid_argument("snapshot: layout does not cover the graph");
    const double scale = style.canvas / 72.0;
    std::ostringstream out;
    out << "graph \"" << detail::dot_escape(g.provenance + "/" + format_day(g.day)) << "\" {\n";
    out << "  label=\"" << detail::dot_escape(detail::caption(g)) << "\";\n";
    out << "  node [shape=circle, style=filled, fontsize=8];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        std::string color = style.receiver_color;
        if (n.is_sender()) {
            auto it = style.colors.find(n.category);
            if (it == style.colors.end()) throw ConfigError("render: no color for category '" + n.category + "'");
            color = it->second;
        }
        out << "  n" << i << " [label=\"" << detail::dot_escape(n.user_id) << "\", fillcolor=\"" << color << "\", pos=\""
            << fixed(lay.positions[i].first * scale) << "," << fixed((1.0 - lay.positions[i].second) * scale) << "!\"];\n";
    }
    for (const auto& [a, b] : simple_edges(g)) out << "  n" << a << " -- n" << b << ";\n";
    out << "}\n";
    return out.str();
}

struct Panel {
    Day day{};
    std::string body;  // from snapshot_body
};

// Chronological grid, left to right then top to bottom, ceil(sqrt(n)) columns.
inline std::string montage(std::vector<Panel> panels, const RenderStyle& style) {
    if (panels.empty()) throw std::invalid_argument("montage: no snapshots");
    std::stable_sort(panels.begin(), panels.end(), [](const Panel& a, const Panel& b) { return a.day < b.day; });
    const auto n = panels.size();
    auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    while (cols * cols < n) ++cols;
    const auto rows = (n + cols - 1) / cols;
    const auto w = static_cast<std::size_t>(style.canvas) * cols;
    const auto h = static_cast<std::size_t>(style.canvas) * rows;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = (i % cols) * static_cast<std::size_t>(style.canvas);
        const auto y = (i / cols) * static_cast<std::size_t>(style.canvas);
        out << "<g class=\"panel\" data-day=\"" << format_day(panels[i].day) << "\" transform=\"translate(" << x << ','
            << y << ")\">\n"
            << panels[i].body << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace dfa
