#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace nvgrape::io {

struct Series {
    std::string label;
    Eigen::VectorXd x, y;
    bool markers = false;  // points instead of a polyline
};

struct LinePlot {
    std::string title, x_label, y_label;
    std::vector<Series> series;
};

// Static SVG renderings of CSV data. Output is deterministic for a given
// input (fixed number formatting, no timestamps).
std::string render_line_plot(const LinePlot& plot);
std::string render_heatmap(const std::string& title, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v, const Eigen::MatrixXd& values);

void write_text_file(const std::string& path, const std::string& contents);

} // namespace nvgrape::io
