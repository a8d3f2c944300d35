#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "table.hpp"

// Minimal self-contained SVG line charts for eyeballing result tables.
namespace stdissim::plot {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

struct Layout {
    std::string_view schema; // schema name without version
    std::string_view title;
    std::string_view x;
    std::vector<std::string_view> y;
    std::string_view y_label;
    bool log_x = false;
    bool log_y = false;
};

inline const std::vector<Layout>& layouts() {
    static const std::vector<Layout> all = {
        {"clg-sweep", "Lattice gas dissimilarity vs density", "rho", {"D_xt", "D_x", "D_t"}, "dissimilarity"},
        {"clg-cid", "Computable information density", "state", {"cid"}, "CID"},
        {"dtc-curve", "DTC dissimilarity vs epsilon", "epsilon", {"mean"}, "D_xt"},
        {"dtc-hamming", "Hamming distance distribution", "d", {"p_even", "p_odd"}, "probability"},
        {"transport-magnetization", "Reference-qubit magnetization", "t", {"Sz_mean"}, "<S^z_0>", true, true},
        {"transport-dissim", "Windowed dissimilarity", "t_window", {"Dxt_mean"}, "D_xt", true, false},
        {"dissim-report", "Dissimilarity by coarse-graining step", "k", {"partial", "cumulative"}, "D"},
    };
    return all;
}

inline std::string_view schema_name(std::string_view schema) { return schema.substr(0, schema.find('/')); }

inline Chart chart_from_table(const CsvTable& t) {
    const std::string_view name = schema_name(t.schema);
    const auto& all = layouts();
    const auto it = std::find_if(all.begin(), all.end(), [&](const Layout& l) { return l.schema == name; });
    if (it == all.end()) throw InvalidInput("no plot layout for schema '" + t.schema + "'");
    if (t.rows.empty()) throw InvalidInput("table '" + t.schema + "' has no data rows");
    Chart c{std::string(it->title), std::string(it->x), std::string(it->y_label), it->log_x, it->log_y, {}};
    const auto x = t.numeric_column(it->x);
    for (auto y : it->y) c.series.push_back({std::string(y), x, t.numeric_column(y)});
    return c;
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double map(double v) const { return ((log ? std::log10(v) : v) - lo) / (hi - lo); }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
            return out;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double r = raw / mag;
        const double step = (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
        for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
            out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
        return out;
    }
};

inline bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

inline Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* d : data)
        for (double v : *d)
            if (usable(v, log)) {
                const double w = log ? std::log10(v) : v;
                lo = std::min(lo, w);
                hi = std::max(hi, w);
            }
    if (!(lo <= hi)) throw InvalidInput("plot: no plottable points");
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    } else if (!log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

} // namespace detail

inline std::string render_svg(const Chart& c) {
    constexpr double W = 720, H = 460, left = 80, right = 170, top = 40, bottom = 60;
    constexpr std::array<std::string_view, 6> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : c.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const detail::Axis ax = detail::make_axis(xs, c.log_x), ay = detail::make_axis(ys, c.log_y);
    const double pw = W - left - right, ph = H - top - bottom;
    auto px = [&](double v) { return left + ax.map(v) * pw; };
    auto py = [&](double v) { return top + (1.0 - ay.map(v)) * ph; };
    using detail::num;

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::escape(c.title) + "</text>\n";
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double x = px(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(x) + "\" y2=\"" + num(top + ph + 5) +
             "\" stroke=\"black\"/><text x=\"" + num(x) + "\" y=\"" + num(top + ph + 18) +
             "\" text-anchor=\"middle\">" + detail::label(t) + "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        s += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y) +
             "\" stroke=\"black\"/><text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" +
             detail::label(t) + "</text>\n";
    }
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 15) + "\" text-anchor=\"middle\">" +
         detail::escape(c.x_label) + (c.log_x ? " (log)" : "") + "</text>\n";
    s += "<text transform=\"translate(20," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape(c.y_label) + (c.log_y ? " (log)" : "") + "</text>\n";
    for (std::size_t k = 0; k < c.series.size(); ++k) {
        const auto& ser = c.series[k];
        const std::string_view col = colors[k % colors.size()];
        std::string pts;
        for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
            if (!detail::usable(ser.x[i], c.log_x) || !detail::usable(ser.y[i], c.log_y)) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(px(ser.x[i])) + "," + num(py(ser.y[i]));
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(k);
        s += "<line x1=\"" + num(W - right + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(W - right + 40) +
             "\" y2=\"" + num(ly) + "\" stroke=\"" + std::string(col) + "\" stroke-width=\"2\"/><text x=\"" +
             num(W - right + 46) + "\" y=\"" + num(ly + 4) + "\">" + detail::escape(ser.name) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace stdissim::plot
