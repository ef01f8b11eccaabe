#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "nvgrape/odmr/lorentzian.hpp"
#include "nvgrape/odmr/spectrum_io.hpp"

namespace fs = std::filesystem;
using namespace nvgrape;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("nvgrape_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " NVGRAPE_CLI_PATH " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("odmr simulate writes one spectrum per coupling and a plot") {
    TempDir a("sim_a"), b("sim_b");
    const std::string args = "odmr simulate --set points=121 --set f_start=2.84e9 --set f_stop=2.90e9 ";
    REQUIRE(run(args + "--out " + a.path.string()) == 0);
    for (int k = 0; k < 4; ++k) CHECK(fs::exists(a.path / ("odmr_spectrum_" + std::to_string(k) + ".csv")));
    CHECK(fs::exists(a.path / "odmr_spectra.svg"));

    const auto flat = odmr::load_spectrum_csv((a.path / "odmr_spectrum_0.csv").string());
    CHECK((flat.pl.maxCoeff() - flat.pl.minCoeff()) / flat.pl.maxCoeff() < 1e-9);
    double last = 0.0;
    for (int k = 0; k < 4; ++k) {
        const auto s = odmr::load_spectrum_csv((a.path / ("odmr_spectrum_" + std::to_string(k) + ".csv")).string());
        const double depth = 1.0 - s.pl.minCoeff() / s.pl.maxCoeff();
        if (k > 0) CHECK(depth > last);
        last = depth;
    }

    REQUIRE(run(args + "--out " + b.path.string()) == 0);
    for (const auto& entry : fs::directory_iterator(a.path)) {
        CHECK(slurp(entry.path()) == slurp(b.path / entry.path().filename()));
    }
}

TEST_CASE("seeded noise is reproducible") {
    TempDir a("noise_a"), b("noise_b"), c("noise_c");
    const std::string args = "odmr simulate --set points=41 --set couplings=6e6 --set noise=0.01 ";
    REQUIRE(run(args + "--seed 3 --out " + a.path.string()) == 0);
    REQUIRE(run(args + "--seed 3 --out " + b.path.string()) == 0);
    REQUIRE(run(args + "--seed 4 --out " + c.path.string()) == 0);
    CHECK(slurp(a.path / "odmr_spectrum_0.csv") == slurp(b.path / "odmr_spectrum_0.csv"));
    CHECK(slurp(a.path / "odmr_spectrum_0.csv") != slurp(c.path / "odmr_spectrum_0.csv"));
}

TEST_CASE("output directory from the environment") {
    TempDir a("env");
    REQUIRE(run("size-grapes", "NVGRAPE_OUT_DIR=" + a.path.string()) == 0);
    CHECK(fs::exists(a.path / "size_grapes.csv"));
}

TEST_CASE("odmr fit reports two dips") {
    TempDir a("fit");
    nv::OdmrSpectrum s;
    s.frequencies = Eigen::VectorXd::LinSpaced(401, 2.82e9, 2.92e9);
    odmr::LorentzianParams p;
    p.dips[0] = {0.02, 2.865e9, 4e6};
    p.dips[1] = {0.025, 2.875e9, 4e6};
    s.pl = odmr::double_lorentzian(s.frequencies, p);
    const fs::path input = a.path / "in.csv";
    odmr::write_spectrum_csv(input.string(), s);

    REQUIRE(run("odmr fit " + input.string() + " --out " + a.path.string()) == 0);
    CHECK(fs::exists(a.path / "fit_overlay.svg"));
    std::map<std::string, std::string> report;
    for (const auto& row : csv_rows(a.path / "fit_report.csv")) report[row[0]] = row[1];
    CHECK(report["converged"] == "true");
    CHECK(std::stod(report["center_1_hz"]) == doctest::Approx(2.865e9).epsilon(1e-9));
    CHECK(std::stod(report["contrast_deeper_percent"]) == doctest::Approx(2.5).epsilon(1e-6));

    // One iteration cannot converge from the automatic seed.
    CHECK(run("odmr fit " + input.string() + " --set max_iterations=1 --out " + a.path.string()) == 5);
}

TEST_CASE("exit codes") {
    TempDir a("codes");
    const std::string out = " --out " + a.path.string();
    CHECK(run("odmr fit /nonexistent/spectrum.csv" + out) == 4);
    CHECK(run("size-grapes --set bogus=1" + out) == 2);
    CHECK(run("size-grapes --set alpha=abc" + out) == 2);
    CHECK(run("size-grapes --set semi_major=1e-3" + out) == 3);
    CHECK(run("size-grapes --config /nonexistent.cfg" + out) == 4);
    CHECK(run("no-such-command") == 2);
    CHECK(run("odmr simulate --set pump_rate=-1" + out) == 2);
}

TEST_CASE("mie resonances table") {
    TempDir a("res"), b("res2");
    REQUIRE(run("mie resonances --out " + a.path.string()) == 0);
    CHECK(fs::exists(a.path / "resonances.svg"));
    const auto rows = csv_rows(a.path / "resonances.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[2][0] == "3");
    CHECK(std::stod(rows[2][2]) == doctest::Approx(0.645).epsilon(0.01));

    REQUIRE(run("mie resonances --set frequency=5.74e9 --out " + b.path.string()) == 0);
    const auto doubled = csv_rows(b.path / "resonances.csv");
    for (int k = 0; k < 3; ++k) {
        CHECK(std::stod(doubled[k][3]) == doctest::Approx(std::stod(rows[k][3]) / 2.0).epsilon(1e-9));
    }
}

TEST_CASE("mie fieldmap lobes") {
    TempDir a("map");
    REQUIRE(run("mie fieldmap --set resolution=24 --out " + a.path.string()) == 0);
    for (int n = 1; n <= 3; ++n) {
        CHECK(fs::exists(a.path / ("fieldmap_n" + std::to_string(n) + ".svg")));
        CHECK(csv_rows(a.path / ("fieldmap_n" + std::to_string(n) + ".csv")).size() == 24 * 24);
    }
    const auto lobes = csv_rows(a.path / "fieldmap_lobes.csv");
    REQUIRE(lobes.size() == 3);
    for (int n = 1; n <= 3; ++n) CHECK(std::stoi(lobes[n - 1][2]) == 2 * n);
}

TEST_CASE("size-grapes") {
    TempDir a("size");
    REQUIRE(run("size-grapes --out " + a.path.string()) == 0);
    const auto row = csv_rows(a.path / "size_grapes.csv").at(0);
    const double b = std::stod(row[4]);
    CHECK(std::abs(b - 8.5e-3) / 8.5e-3 <= 0.15);
    CHECK(std::stod(row[5]) == doctest::Approx(0.645 * std::stod(row[3])).epsilon(1e-8));
}
