#pragma once

// Dependency-free SVG line/scatter plots with a fixed 800x500 viewBox.

#include <aerobench/core.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace aerobench {

struct PlotSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool line = true;
    bool markers = false;
    double width = 1.5;
    double opacity = 1.0;
    bool in_legend = true;
};

/// Filled region between lo(x) and hi(x).
struct PlotBand
{
    std::vector<double> x;
    std::vector<double> lo;
    std::vector<double> hi;
    std::string color = "#1f77b4";
    double opacity = 0.2;
};

class SvgPlot
{
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label))
    {
    }

    void add(PlotSeries s) { series_.push_back(std::move(s)); }
    void add(PlotBand b) { bands_.push_back(std::move(b)); }

    std::string render() const
    {
        Range xr;
        Range yr;
        for (const auto& s : series_) {
            xr.include(s.x);
            yr.include(s.y);
        }
        for (const auto& b : bands_) {
            xr.include(b.x);
            yr.include(b.lo);
            yr.include(b.hi);
        }
        xr.finish();
        yr.finish();

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" width=\"800\" height=\"500\">\n";
        out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
        out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(title_) + "</text>\n";

        // Axes and ticks.
        out += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
        out += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kPlotW) + "\" height=\"" +
               fmt(kPlotH) + "\"/>\n</g>\n";
        out += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
        for (double t : ticks(xr)) {
            const double px = map_x(xr, t);
            out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kTop + kPlotH) + "\" x2=\"" + fmt(px) + "\" y2=\"" +
                   fmt(kTop + kPlotH + 5) + "\" stroke=\"black\"/>\n";
            out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kTop + kPlotH + 18) + "\" text-anchor=\"middle\">" +
                   fmt(t) + "</text>\n";
        }
        for (double t : ticks(yr)) {
            const double py = map_y(yr, t);
            out += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
                   fmt(py) + "\" stroke=\"black\"/>\n";
            out += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py + 4) + "\" text-anchor=\"end\">" + fmt(t) +
                   "</text>\n";
        }
        out += "</g>\n";
        out += "<text x=\"" + fmt(kLeft + kPlotW / 2) + "\" y=\"490\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"13\">" + escape(x_label_) + "</text>\n";
        out += "<text x=\"18\" y=\"" + fmt(kTop + kPlotH / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"13\" transform=\"rotate(-90 18 " + fmt(kTop + kPlotH / 2) + ")\">" + escape(y_label_) +
               "</text>\n";

        for (const auto& b : bands_) {
            if (b.x.empty()) {
                continue;
            }
            out += "<polygon class=\"band\" fill=\"" + b.color + "\" fill-opacity=\"" + fmt(b.opacity) +
                   "\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < b.x.size(); ++i) {
                out += fmt(map_x(xr, b.x[i])) + "," + fmt(map_y(yr, b.hi[i])) + " ";
            }
            for (std::size_t i = b.x.size(); i-- > 0;) {
                out += fmt(map_x(xr, b.x[i])) + "," + fmt(map_y(yr, b.lo[i])) + " ";
            }
            out += "\"/>\n";
        }
        for (std::size_t s = 0; s < series_.size(); ++s) {
            const auto& ser = series_[s];
            const std::string cls = "s" + std::to_string(s);
            if (ser.line && ser.x.size() > 1) {
                out += "<polyline class=\"line " + cls + "\" fill=\"none\" stroke=\"" + ser.color +
                       "\" stroke-width=\"" + fmt(ser.width) + "\" stroke-opacity=\"" + fmt(ser.opacity) +
                       "\" points=\"";
                for (std::size_t i = 0; i < ser.x.size(); ++i) {
                    out += fmt(map_x(xr, ser.x[i])) + "," + fmt(map_y(yr, ser.y[i])) + " ";
                }
                out += "\"/>\n";
            }
            if (ser.markers) {
                for (std::size_t i = 0; i < ser.x.size(); ++i) {
                    out += "<circle class=\"marker " + cls + "\" cx=\"" + fmt(map_x(xr, ser.x[i])) + "\" cy=\"" +
                           fmt(map_y(yr, ser.y[i])) + "\" r=\"3\" fill=\"" + ser.color + "\" fill-opacity=\"" +
                           fmt(ser.opacity) + "\"/>\n";
                }
            }
        }

        // Legend.
        double ly = kTop + 14;
        for (const auto& ser : series_) {
            if (!ser.in_legend || ser.label.empty()) {
                continue;
            }
            out += "<rect x=\"" + fmt(kLeft + kPlotW - 150) + "\" y=\"" + fmt(ly - 9) +
                   "\" width=\"12\" height=\"12\" fill=\"" + ser.color + "\"/>\n";
            out += "<text x=\"" + fmt(kLeft + kPlotW - 132) + "\" y=\"" + fmt(ly + 1) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(ser.label) + "</text>\n";
            ly += 18;
        }
        out += "</svg>\n";
        return out;
    }

    void save(const std::string& path) const
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
        }
        out << render();
        if (!out) {
            fail(ErrorCode::IoError, "failed writing '" + path + "'");
        }
    }

private:
    static constexpr double kLeft = 80.0;
    static constexpr double kTop = 40.0;
    static constexpr double kPlotW = 680.0;
    static constexpr double kPlotH = 400.0;

    struct Range
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();

        void include(const std::vector<double>& v)
        {
            for (double x : v) {
                if (std::isfinite(x)) {
                    lo = std::min(lo, x);
                    hi = std::max(hi, x);
                }
            }
        }
        void finish()
        {
            if (!(lo <= hi)) {
                lo = 0.0;
                hi = 1.0;
            }
            if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
                const double pad = std::max(0.5, std::abs(lo) * 0.05);
                lo -= pad;
                hi += pad;
            }
            const double pad = 0.04 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
    };

    static double map_x(const Range& r, double x) { return kLeft + (x - r.lo) / (r.hi - r.lo) * kPlotW; }
    static double map_y(const Range& r, double y) { return kTop + (r.hi - y) / (r.hi - r.lo) * kPlotH; }

    static std::vector<double> ticks(const Range& r)
    {
        const double span = r.hi - r.lo;
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double norm = raw / mag;
        const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
        std::vector<double> out;
        for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-9 * step; t += step) {
            out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
        }
        return out;
    }

    static std::string fmt(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    static std::string escape(const std::string& s)
    {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out.push_back(c);
            }
        }
        return out;
    }

    std::string title_;
    std::string x_label_;
    std::string y_label_;
    std::vector<PlotSeries> series_;
    std::vector<PlotBand> bands_;
};

} // namespace aerobench
