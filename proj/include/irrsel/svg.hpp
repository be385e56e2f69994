#pragma once

// Minimal deterministic SVG line-chart writer for multi-panel figures.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "irrsel/error.hpp"
#include "irrsel/format.hpp"

namespace irrsel {

enum class LineStyle { solid, dashed, dotted, none };

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y; // NaN breaks the line
    LineStyle style = LineStyle::solid;
    bool markers = false;
    std::string color; // empty = palette colour by series index
    double line_width = 1.5;
    bool in_legend = true;
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> y_range;
    bool legend = true;
};

struct PlotLayout {
    std::string title;
    std::size_t rows = 1;
    std::size_t cols = 1;
    double panel_width = 360.0;
    double panel_height = 260.0;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline const char* palette(std::size_t i) {
    static constexpr const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colours[i % std::size(colours)];
}

inline const char* dash_array(LineStyle s) {
    switch (s) {
    case LineStyle::dashed: return "6,4";
    case LineStyle::dotted: return "1.5,3";
    default: return nullptr;
    }
}

inline std::pair<double, double> data_range(const PlotPanel& p, bool want_x) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : p.series) {
        for (double v : want_x ? s.x : s.y) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) return {0.0, 1.0};
    if (lo == hi) return {lo - 0.5, hi + 0.5};
    return {lo, hi};
}

inline std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
    return out;
}

} // namespace detail

/// Renders panels row-major into an SVG document. Output depends only on the
/// input, so identical input yields identical bytes.
inline std::string emit_plot(const std::vector<PlotPanel>& panels, const PlotLayout& layout) {
    bool any_point = false;
    for (const auto& p : panels) {
        for (const auto& s : p.series) {
            if (s.x.size() != s.y.size()) throw Error(ErrorKind::usage, "cli", "plot series '" + s.label + "': x/y length mismatch");
            any_point = any_point || !s.x.empty();
        }
    }
    if (!any_point) throw Error(ErrorKind::usage, "cli", "emit_plot: no data points to plot");
    if (layout.rows * layout.cols < panels.size()) throw Error(ErrorKind::usage, "cli", "emit_plot: layout has too few cells");

    const double margin_left = 56.0, margin_right = 16.0, margin_top = 28.0, margin_bottom = 44.0;
    const double title_height = layout.title.empty() ? 0.0 : 28.0;
    const double legend_width = 170.0;
    const double cell_w = layout.panel_width + legend_width;
    const double width = cell_w * static_cast<double>(layout.cols);
    const double height = title_height + layout.panel_height * static_cast<double>(layout.rows);
    const auto fx = [](double v) { return format_fixed(v, 2); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(width) << "\" height=\"" << fx(height)
        << "\" viewBox=\"0 0 " << fx(width) << ' ' << fx(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!layout.title.empty()) {
        svg << "<text class=\"title\" x=\"" << fx(width / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
            << detail::xml_escape(layout.title) << "</text>\n";
    }

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double ox = cell_w * static_cast<double>(pi % layout.cols);
        const double oy = title_height + layout.panel_height * static_cast<double>(pi / layout.cols);
        const double px0 = ox + margin_left;
        const double py0 = oy + margin_top;
        const double pw = layout.panel_width - margin_left - margin_right;
        const double ph = layout.panel_height - margin_top - margin_bottom;
        const auto [x_lo, x_hi] = panel.x_range.value_or(detail::data_range(panel, true));
        const auto [y_lo, y_hi] = panel.y_range.value_or(detail::data_range(panel, false));
        const auto sx = [&](double v) { return px0 + (v - x_lo) / (x_hi - x_lo) * pw; };
        const auto sy = [&](double v) { return py0 + ph - (v - y_lo) / (y_hi - y_lo) * ph; };

        svg << "<g class=\"panel\" id=\"panel-" << pi << "\">\n";
        svg << "<rect x=\"" << fx(px0) << "\" y=\"" << fx(py0) << "\" width=\"" << fx(pw) << "\" height=\"" << fx(ph)
            << "\" fill=\"none\" stroke=\"#444\"/>\n";
        if (!panel.title.empty()) {
            svg << "<text class=\"panel-title\" x=\"" << fx(px0 + pw / 2) << "\" y=\"" << fx(oy + 18)
                << "\" text-anchor=\"middle\">" << detail::xml_escape(panel.title) << "</text>\n";
        }
        for (double t : detail::ticks(x_lo, x_hi)) {
            svg << "<line x1=\"" << fx(sx(t)) << "\" y1=\"" << fx(py0 + ph) << "\" x2=\"" << fx(sx(t)) << "\" y2=\""
                << fx(py0 + ph + 4) << "\" stroke=\"#444\"/><text x=\"" << fx(sx(t)) << "\" y=\"" << fx(py0 + ph + 15)
                << "\" text-anchor=\"middle\">" << format_shortest(std::round(t * 1e6) / 1e6) << "</text>\n";
        }
        for (double t : detail::ticks(y_lo, y_hi)) {
            svg << "<line x1=\"" << fx(px0 - 4) << "\" y1=\"" << fx(sy(t)) << "\" x2=\"" << fx(px0) << "\" y2=\""
                << fx(sy(t)) << "\" stroke=\"#444\"/><text x=\"" << fx(px0 - 6) << "\" y=\"" << fx(sy(t) + 4)
                << "\" text-anchor=\"end\">" << format_shortest(std::round(t * 1e6) / 1e6) << "</text>\n";
        }
        if (!panel.x_label.empty()) {
            svg << "<text x=\"" << fx(px0 + pw / 2) << "\" y=\"" << fx(py0 + ph + 32) << "\" text-anchor=\"middle\">"
                << detail::xml_escape(panel.x_label) << "</text>\n";
        }
        if (!panel.y_label.empty()) {
            const double yx = ox + 14, yy = py0 + ph / 2;
            svg << "<text x=\"" << fx(yx) << "\" y=\"" << fx(yy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
                << fx(yx) << ' ' << fx(yy) << ")\">" << detail::xml_escape(panel.y_label) << "</text>\n";
        }

        std::size_t legend_row = 0;
        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const auto& s = panel.series[si];
            const std::string colour = s.color.empty() ? detail::palette(si) : s.color;
            if (s.style != LineStyle::none) {
                std::string points;
                const auto flush = [&] {
                    if (points.empty()) return;
                    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\""
                        << fx(s.line_width) << '"';
                    if (const char* dash = detail::dash_array(s.style)) svg << " stroke-dasharray=\"" << dash << '"';
                    svg << " points=\"" << points << "\"/>\n";
                    points.clear();
                };
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                        flush();
                        continue;
                    }
                    if (!points.empty()) points.push_back(' ');
                    points += fx(sx(s.x[i])) + "," + fx(sy(s.y[i]));
                }
                flush();
            }
            if (s.markers) {
                for (std::size_t i = 0; i < s.x.size(); ++i) {
                    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                    svg << "<circle class=\"marker\" cx=\"" << fx(sx(s.x[i])) << "\" cy=\"" << fx(sy(s.y[i]))
                        << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
                }
            }
            if (panel.legend && s.in_legend && !s.label.empty()) {
                const double lx = ox + layout.panel_width + 4;
                const double ly = py0 + 10 + 14.0 * static_cast<double>(legend_row++);
                svg << "<line x1=\"" << fx(lx) << "\" y1=\"" << fx(ly - 4) << "\" x2=\"" << fx(lx + 18) << "\" y2=\""
                    << fx(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"";
                if (const char* dash = detail::dash_array(s.style)) svg << " stroke-dasharray=\"" << dash << '"';
                svg << "/><text class=\"legend\" x=\"" << fx(lx + 22) << "\" y=\"" << fx(ly) << "\">"
                    << detail::xml_escape(s.label) << "</text>\n";
            }
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace irrsel
