#include "doctest.h"

#include <sstream>

#include "nvgrape/errors.hpp"
#include "nvgrape/io/kv_config.hpp"
#include "nvgrape/io/svg_plot.hpp"
#include "nvgrape/odmr/spectrum_io.hpp"

using namespace nvgrape;

namespace {

std::string io_error_text(const std::string& csv) {
    std::istringstream in(csv);
    try {
        odmr::parse_spectrum_csv(in, "s.csv");
    } catch (const IoError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("minimal spectrum file") {
    std::istringstream in("frequency_hz,pl\n2.86e9,1.0\n2.87e9,0.98\n");
    const auto s = odmr::parse_spectrum_csv(in);
    REQUIRE(s.size() == 2);
    CHECK(s.frequencies(1) == 2.87e9);
    CHECK(s.pl(1) == 0.98);
}

TEST_CASE("spectrum file errors name the line") {
    CHECK(io_error_text("frequency_hz,pl\n1,1\n2,1\n2,1\n").find("s.csv:4:") == 0);
    CHECK(io_error_text("frequency_hz,pl\n1,1\n2,abc\n").find("s.csv:3:") == 0);
    CHECK(io_error_text("frequency_hz,pl\n1,1\n2,-1\n").find("s.csv:3:") == 0);
    CHECK(io_error_text("freq,pl\n1,1\n2,1\n").find("s.csv:1:") == 0);
    CHECK(io_error_text("frequency_hz,pl\n1,1\n").find("at least two") != std::string::npos);
    CHECK(io_error_text("").find("empty") != std::string::npos);
    CHECK_THROWS_AS(odmr::load_spectrum_csv("/nonexistent/file.csv"), IoError);
}

TEST_CASE("spectrum round trip is exact") {
    nv::OdmrSpectrum s;
    s.frequencies = Eigen::VectorXd::LinSpaced(7, 2.8e9, 2.9e9);
    s.pl = Eigen::VectorXd::LinSpaced(7, 0.1, 0.7).array() + 1.0 / 3.0;
    std::stringstream buf;
    odmr::write_spectrum_csv(buf, s);
    const auto back = odmr::parse_spectrum_csv(buf);
    CHECK(back.frequencies == s.frequencies);
    CHECK(back.pl == s.pl);
}

TEST_CASE("key-value configuration") {
    std::istringstream in("# comment\nradius = 0.01  # m\n\nn1=8.9\nflag = yes\nlist = 1, 2,3\n");
    auto cfg = io::KvConfig::parse(in);
    CHECK(cfg.get_double("radius", 0.0) == 0.01);
    CHECK(cfg.get_double("missing", 4.0) == 4.0);
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_list("list", {}) == std::vector<double>{1.0, 2.0, 3.0});
    cfg.set_assignment("radius=0.02");
    CHECK(cfg.get_double("radius", 0.0) == 0.02);
    CHECK_NOTHROW(cfg.require_known({"radius", "n1", "flag", "list"}));
    CHECK_THROWS_AS(cfg.require_known({"radius"}), ConfigError);
    CHECK_THROWS_AS(cfg.set_assignment("novalue"), ConfigError);
    cfg.set("n1", "abc");
    CHECK_THROWS_AS(cfg.get_double("n1", 0.0), ConfigError);
    cfg.set("n", "2.5");
    CHECK_THROWS_AS(cfg.get_int("n", 0), ConfigError);

    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(io::KvConfig::parse(bad), ConfigError);
    CHECK_THROWS_AS(io::KvConfig::load("/nonexistent.cfg"), IoError);
}

TEST_CASE("plots are deterministic") {
    io::LinePlot plot;
    plot.title = "t";
    plot.series.push_back({"a", Eigen::VectorXd::LinSpaced(5, 0, 1), Eigen::VectorXd::LinSpaced(5, 1, 2), false});
    const auto svg = io::render_line_plot(plot);
    CHECK(svg == io::render_line_plot(plot));
    CHECK(svg.find("<svg") != std::string::npos);
    const auto heat = io::render_heatmap("h", Eigen::VectorXd::LinSpaced(3, 0, 1),
                                         Eigen::VectorXd::LinSpaced(3, 0, 1), Eigen::MatrixXd::Random(3, 3));
    CHECK(heat.find("</svg>") != std::string::npos);
}
