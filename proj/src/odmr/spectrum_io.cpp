#include "nvgrape/odmr/spectrum_io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "nvgrape/errors.hpp"

namespace nvgrape::odmr {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, out);
    return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

} // namespace

nv::OdmrSpectrum parse_spectrum_csv(std::istream& in, const std::string& source) {
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw IoError(source + ":" + std::to_string(line_no) + ": " + what);
    };

    if (!std::getline(in, line)) {
        ++line_no;
        fail("empty file, expected header 'frequency_hz,pl'");
    }
    ++line_no;
    if (trim(line) != "frequency_hz,pl") fail("expected header 'frequency_hz,pl'");

    std::vector<double> freq, pl;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            fail("malformed row, expected two comma-separated values");
        }
        double f = 0.0, y = 0.0;
        if (!parse_double(line.substr(0, comma), f) || !parse_double(line.substr(comma + 1), y)) {
            fail("malformed row, values are not finite numbers");
        }
        if (!freq.empty() && !(f > freq.back())) {
            fail("frequency is not strictly increasing (duplicate or out of order)");
        }
        if (!(y > 0.0)) fail("PL must be positive");
        freq.push_back(f);
        pl.push_back(y);
    }
    if (freq.size() < 2) {
        throw IoError(source + ": need at least two samples");
    }

    nv::OdmrSpectrum s;
    s.frequencies = Eigen::Map<const Eigen::VectorXd>(freq.data(), freq.size());
    s.pl = Eigen::Map<const Eigen::VectorXd>(pl.data(), pl.size());
    return s;
}

nv::OdmrSpectrum load_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return parse_spectrum_csv(in, path);
}

void write_spectrum_csv(std::ostream& out, const nv::OdmrSpectrum& spectrum) {
    out << "frequency_hz,pl\n";
    char buf[64];
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", spectrum.frequencies(i), spectrum.pl(i));
        out << buf;
    }
}

void write_spectrum_csv(const std::string& path, const nv::OdmrSpectrum& spectrum) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    write_spectrum_csv(out, spectrum);
    if (!out) throw IoError("write failed for " + path);
}

} // namespace nvgrape::odmr
