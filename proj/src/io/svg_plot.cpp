#include "nvgrape/io/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nvgrape/errors.hpp"

namespace nvgrape::io {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 160.0, kTop = 40.0, kBottom = 60.0;

const std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

void header(std::ostringstream& o, const std::string& title) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title) << "</text>\n";
}

} // namespace

std::string render_line_plot(const LinePlot& plot) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const Series& s : plot.series) {
        if (s.x.size() == 0) continue;
        xmin = std::min(xmin, s.x.minCoeff());
        xmax = std::max(xmax, s.x.maxCoeff());
        ymin = std::min(ymin, s.y.minCoeff());
        ymax = std::max(ymax, s.y.maxCoeff());
    }
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream o;
    header(o, plot.title);
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv)
          << "</text>\n";
        o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(yv) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(plot.x_label) << "</text>\n";
    o << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << num(kTop + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const Series& s = plot.series[k];
        const char* colour = kPalette[k % kPalette.size()];
        if (s.markers) {
            for (Eigen::Index i = 0; i < s.x.size(); ++i) {
                o << "<circle cx=\"" << num(sx(s.x(i))) << "\" cy=\"" << num(sy(s.y(i)))
                  << "\" r=\"1.8\" fill=\"" << colour << "\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (Eigen::Index i = 0; i < s.x.size(); ++i) {
                o << (i ? " " : "") << num(sx(s.x(i))) << ',' << num(sy(s.y(i)));
            }
            o << "\"/>\n";
        }
        const double ly = kTop + 16.0 * (k + 1);
        o << "<line x1=\"" << num(kWidth - kRight + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
          << num(kWidth - kRight + 30) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << colour
          << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << num(kWidth - kRight + 36) << "\" y=\"" << num(ly)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string render_heatmap(const std::string& title, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v, const Eigen::MatrixXd& values) {
    const double side = std::min(kWidth - kLeft - kRight, kHeight - kTop - kBottom);
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    const double range = hi > lo ? hi - lo : 1.0;
    const double cw = side / static_cast<double>(u.size());
    const double ch = side / static_cast<double>(v.size());

    std::ostringstream o;
    header(o, title);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            // Dark blue -> yellow ramp.
            const double t = (values(i, j) - lo) / range;
            const int r = static_cast<int>(std::lround(255 * t));
            const int g = static_cast<int>(std::lround(40 + 200 * t));
            const int b = static_cast<int>(std::lround(120 * (1.0 - t)));
            char colour[16];
            std::snprintf(colour, sizeof colour, "#%02x%02x%02x", r, g, b);
            o << "<rect x=\"" << num(kLeft + cw * i) << "\" y=\""
              << num(kTop + side - ch * (j + 1)) << "\" width=\"" << num(cw + 0.05)
              << "\" height=\"" << num(ch + 0.05) << "\" fill=\"" << colour << "\"/>\n";
        }
    }
    o << "<text x=\"" << num(kLeft) << "\" y=\"" << num(kTop + side + 18)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick(u(0)) << " m</text>\n"
      << "<text x=\"" << num(kLeft + side) << "\" y=\"" << num(kTop + side + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick(u(u.size() - 1)) << " m</text>\n"
      << "<text x=\"" << num(kLeft + side + 12) << "\" y=\"" << num(kTop + 12)
      << "\" font-family=\"sans-serif\" font-size=\"11\">max " << tick(hi) << "</text>\n"
      << "<text x=\"" << num(kLeft + side + 12) << "\" y=\"" << num(kTop + side)
      << "\" font-family=\"sans-serif\" font-size=\"11\">min " << tick(lo) << "</text>\n"
      << "</svg>\n";
    return o.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << contents;
    if (!out) throw IoError("write failed for " + path);
}

} // namespace nvgrape::io
