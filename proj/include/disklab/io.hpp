// disklab/io.hpp — CSV / SVG artifact writers shared by the CLI.
//
// All numeric output uses a fixed "%.17g" format so reruns with identical
// configs produce byte-identical artifacts.
//
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "disklab/common.hpp"

namespace disklab {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
    }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << fmt_double(vals[i]);
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Minimal SVG canvas: polylines, circles, and line segments in user
// coordinates mapped to a fixed viewport.
// ---------------------------------------------------------------------------
class SvgCanvas {
public:
    SvgCanvas(double xmin, double xmax, double ymin, double ymax, int width = 720,
              int height = 720)
        : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), w_(width), h_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
              << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
              << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }

    void polyline(const std::vector<complex>& pts, const std::string& color,
                  double stroke = 1.2, bool close = false) {
        if (pts.size() < 2) return;
        body_ << "<path d=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            body_ << (i == 0 ? "M" : "L") << px(pts[i].real()) << " " << py(pts[i].imag());
        }
        if (close) body_ << "Z";
        body_ << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke
              << "\"/>\n";
    }

    void curve_xy(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double stroke = 1.0) {
        std::vector<complex> pts;
        pts.reserve(x.size());
        for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) pts.emplace_back(x[i], y[i]);
        polyline(pts, color, stroke);
    }

    void circle(complex c, double r_user, const std::string& color, bool filled = false) {
        body_ << "<circle cx=\"" << px(c.real()) << "\" cy=\"" << py(c.imag()) << "\" r=\""
              << r_user * w_ / (xmax_ - xmin_) << "\" fill=\"" << (filled ? color : "none")
              << "\" stroke=\"" << color << "\"/>\n";
    }

    void segment(complex a, complex b, const std::string& color, double stroke = 1.0) {
        body_ << "<line x1=\"" << px(a.real()) << "\" y1=\"" << py(a.imag()) << "\" x2=\""
              << px(b.real()) << "\" y2=\"" << py(b.imag()) << "\" stroke=\"" << color
              << "\" stroke-width=\"" << stroke << "\"/>\n";
    }

    void save(const std::string& path) {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot open output file: " + path);
        out << body_.str() << "</svg>\n";
    }

private:
    double px(double x) const { return (x - xmin_) / (xmax_ - xmin_) * w_; }
    double py(double y) const { return h_ - (y - ymin_) / (ymax_ - ymin_) * h_; }

    double xmin_, xmax_, ymin_, ymax_;
    int w_, h_;
    std::ostringstream body_;
};

}  // namespace disklab
