#include "nvgrape/mie/mie.hpp"

#include <cmath>
#include <sstream>

#include "nvgrape/errors.hpp"
#include "nvgrape/mie/special_functions.hpp"

namespace nvgrape::mie {

void MieConfig::validate() const {
    if (!std::isfinite(n1.real()) || !std::isfinite(n1.imag()) || !(n1.real() > 0.0)) {
        throw ConfigError("n1 must have a positive real part");
    }
    if (!std::isfinite(n2) || !(n2 > 0.0)) throw ConfigError("n2 must be positive");
    if (!std::isfinite(mu1) || !(mu1 > 0.0)) throw ConfigError("mu1 must be positive");
    if (!std::isfinite(mu2) || !(mu2 > 0.0)) throw ConfigError("mu2 must be positive");
    if (!std::isfinite(radius) || !(radius > 0.0)) throw ConfigError("radius must be positive");
    if (!std::isfinite(frequency) || !(frequency > 0.0)) {
        throw ConfigError("frequency must be positive");
    }
    if (n_max && *n_max < 1) throw ConfigError("n_max must be at least 1");
}

int default_truncation(double rho) {
    const int n = static_cast<int>(std::ceil(rho + 4.0 * std::cbrt(rho) + 2.0));
    return std::max(n, 10);
}

int MieConfig::truncation() const {
    return n_max ? *n_max : default_truncation(size_parameter());
}

namespace {

// Bessel-type quantities shared by every coefficient at one (n, rho).
struct Terms {
    Complex j_rho, h_rho, j_in;           // j_n(rho), h_n(rho), j_n(N rho)
    Complex dj_rho, dh_rho, dj_in;        // Riccati derivatives
};

Terms terms(int n, double rho, Complex big_n) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw ConfigError("size parameter must be positive");
    }
    const Complex i(0.0, 1.0);
    const Complex x_in = big_n * rho;

    const auto j = spherical_j_sequence(n, rho).cast<Complex>().eval();
    const auto h = spherical_h1_sequence(n, rho);
    const auto jn = spherical_j_sequence(n, x_in);
    const auto dj = riccati_derivative_sequence<Complex>(j, Complex(rho), std::cos(Complex(rho)));
    const auto dh = riccati_derivative_sequence<Complex>(h, Complex(rho), std::exp(i * rho));
    const auto djn = riccati_derivative_sequence<Complex>(jn, x_in, std::cos(x_in));
    return {j(n), h(n), jn(n), dj(n), dh(n), djn(n)};
}

} // namespace

Complex characteristic_fn(int n, double rho, const MieConfig& cfg) {
    const Terms t = terms(n, rho, cfg.relative_index());
    return cfg.mu1 * t.j_in * t.dh_rho - cfg.mu2 * t.h_rho * t.dj_in;
}

MieCoefficients mie_coefficients_at(int n, double rho, const MieConfig& cfg) {
    if (n < 1) throw ConfigError("multipole order must be at least 1");
    const Complex big_n = cfg.relative_index();
    const Complex n2sq = big_n * big_n;
    const double mu1 = cfg.mu1;
    const double mu2 = cfg.mu2;
    const Terms t = terms(n, rho, big_n);

    auto ratio = [&](Complex num, Complex den, const char* name) {
        if (std::abs(den) < 1e-12 * std::abs(num)) {
            std::ostringstream msg;
            msg << "coefficient " << name << " of order " << n << " at rho = " << rho
                << " is at a resonance pole";
            throw NumericError(msg.str());
        }
        return num / den;
    };

    MieCoefficients c;
    c.order = n;
    c.a_int = ratio(mu1 * t.dh_rho * t.j_rho - mu1 * t.dj_rho * t.h_rho,
                    mu1 * t.dh_rho * t.j_in - mu2 * t.dj_in * t.h_rho, "a_int");
    c.b_int = ratio(mu1 * big_n * t.dh_rho * t.j_rho - mu1 * big_n * t.dj_rho * t.h_rho,
                    mu2 * n2sq * t.dh_rho * t.j_in - mu1 * t.dj_in * t.h_rho, "b_int");
    c.a_ext = -ratio(mu1 * t.j_in * t.dj_rho - mu2 * t.j_rho * t.dj_in,
                     mu1 * t.j_in * t.dh_rho - mu2 * t.h_rho * t.dj_in, "a_ext");
    c.b_ext = -ratio(mu1 * t.j_rho * t.dj_in - mu2 * n2sq * t.j_in * t.dj_rho,
                     mu1 * t.h_rho * t.dj_in - mu2 * n2sq * t.j_in * t.dh_rho, "b_ext");
    return c;
}

MieCoefficients mie_coefficients(int n, const MieConfig& cfg) {
    cfg.validate();
    return mie_coefficients_at(n, cfg.size_parameter(), cfg);
}

namespace {

double golden_section_min(auto&& f, double lo, double hi, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<ResonanceResult> find_resonances(int n, const MieConfig& cfg, double rho_min,
                                             double rho_max, int mode_count,
                                             const ResonanceScan& scan) {
    cfg.validate();
    if (n < 1) throw ConfigError("multipole order must be at least 1");
    if (!(rho_min > 0.0) || !(rho_max > rho_min)) {
        throw ConfigError("require 0 < rho_min < rho_max");
    }
    if (mode_count < 1) throw ConfigError("mode_count must be at least 1");
    if (scan.grid_points < 2000) throw ConfigError("resonance scan needs at least 2000 points");

    auto magnitude = [&](double rho) { return std::abs(characteristic_fn(n, rho, cfg)); };

    const int m = scan.grid_points;
    const double step = (rho_max - rho_min) / (m - 1);
    std::vector<double> grid(m), values(m);
    for (int i = 0; i < m; ++i) {
        grid[i] = rho_min + step * i;
        values[i] = magnitude(grid[i]);
    }

    const double wavelength_env = cfg.wavelength() / cfg.n2;
    std::vector<ResonanceResult> found;
    for (int i = 1; i + 1 < m && static_cast<int>(found.size()) < mode_count; ++i) {
        if (!(values[i] < values[i - 1] && values[i] < values[i + 1])) continue;
        const double rho = golden_section_min(magnitude, grid[i - 1], grid[i + 1], scan.tolerance);
        ResonanceResult r;
        r.order = n;
        r.mode_index = static_cast<int>(found.size()) + 1;
        r.rho_res = rho;
        r.radius = rho * wavelength_env / kTwoPi;
        r.alpha = rho;
        r.residual = magnitude(rho);
        found.push_back(r);
    }

    if (static_cast<int>(found.size()) < mode_count) {
        std::ostringstream msg;
        msg << "found " << found.size() << " of " << mode_count << " requested minima of |D_" << n
            << "| on [" << rho_min << ", " << rho_max << "]";
        for (const auto& r : found) msg << "; mode " << r.mode_index << " at rho = " << r.rho_res;
        throw NumericError(msg.str());
    }
    return found;
}

} // namespace nvgrape::mie
