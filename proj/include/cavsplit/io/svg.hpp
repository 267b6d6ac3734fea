#pragma once

// Minimal self-contained SVG line/scatter plots. Output depends only on the
// data, so identical inputs give identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cavsplit/error.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit::io {

class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void line(std::vector<double> x, std::vector<double> y, std::string color, bool dashed = false) {
        series_.push_back({std::move(x), std::move(y), std::move(color), dashed, false, {}});
    }

    /// Markers; `sizes` (optional) in pixels.
    void points(std::vector<double> x, std::vector<double> y, std::string color, std::vector<double> sizes = {}) {
        series_.push_back({std::move(x), std::move(y), std::move(color), false, true, std::move(sizes)});
    }

    std::string render() const {
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& s : series_) {
            for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
            for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
        }
        if (!(x1 > x0)) x0 -= 1.0, x1 += 1.0;
        if (!(y1 > y0)) y0 -= 1.0, y1 += 1.0;
        const double pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;

        auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (width - left - right); };
        auto py = [&](double y) { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); };

        std::ostringstream o;
        o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
          << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
          << escape(title_) << "</text>\n";

        // axes and ticks
        o << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
          << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
          << height - top - bottom << "\"/>\n</g>\n";
        o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
        for (int i = 0; i <= 5; ++i) {
            const double xv = x0 + (x1 - x0) * i / 5.0;
            const double yv = y0 + (y1 - y0) * i / 5.0;
            o << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
              << fmt(xv) << "</text>\n";
            o << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
              << "</text>\n";
        }
        o << "<text x=\"" << width / 2 << "\" y=\"" << height - 8 << "\" text-anchor=\"middle\">" << escape(x_label_)
          << "</text>\n";
        o << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
          << height / 2 << ")\">" << escape(y_label_) << "</text>\n</g>\n";

        for (const auto& s : series_) {
            if (s.markers) {
                o << "<g fill=\"" << s.color << "\" stroke=\"none\">\n";
                for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                    const double r = i < s.sizes.size() ? s.sizes[i] : 3.0;
                    o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"" << fmt(r)
                      << "\"/>\n";
                }
                o << "</g>\n";
            } else {
                o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\""
                  << (s.dashed ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
                for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
                    o << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
                o << "\"/>\n";
            }
        }
        o << "</svg>\n";
        return o.str();
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << render();
    }

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        bool dashed;
        bool markers;
        std::vector<double> sizes;
    };

    static std::string fmt(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
            }
        }
        return out;
    }

    static constexpr int width = 900;
    static constexpr int height = 500;
    static constexpr int left = 70;
    static constexpr int right = 20;
    static constexpr int top = 40;
    static constexpr int bottom = 50;

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    return colors;
}

/// Transmission vs detuning (GHz), with the empty cavity dashed and peaks marked.
inline SvgPlot spectrum_plot(const Spectrum& spectrum, const std::vector<Peak>& peaks, const std::string& title) {
    SvgPlot plot(title, "detuning (GHz)", "normalized transmission");
    std::vector<double> x(spectrum.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = spectrum.frequency(i) * 1e-9;
    if (spectrum.params) {
        Scenario empty = *spectrum.params;
        empty.medium.a0_La = 0.0;
        std::vector<double> y(spectrum.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = transmission(to_angular(spectrum.frequency(i)), empty);
        plot.line(x, std::move(y), "#1f77b4", true);
    }
    plot.line(std::move(x), spectrum.values, "#d62728");
    std::vector<double> px, py;
    for (const auto& p : peaks) {
        px.push_back(p.position_hz * 1e-9);
        py.push_back(p.height);
    }
    plot.points(std::move(px), std::move(py), "black");
    return plot;
}

} // namespace cavsplit::io
