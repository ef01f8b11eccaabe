// Acceptance suite: one PASS/FAIL line per criterion, each with its own
// runtime limit. Exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nvgrape/mie/ellipse.hpp"
#include "nvgrape/mie/fields.hpp"
#include "nvgrape/mie/mie.hpp"
#include "nvgrape/nv/dynamics.hpp"
#include "nvgrape/nv/odmr.hpp"
#include "nvgrape/odmr/lorentzian.hpp"
#include "test_support.hpp"

using namespace nvgrape;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %s  %-44s %7.3f s (limit %g s)  %s%s\n", id, pass ? "PASS" : "FAIL", title, secs,
                limit_s, out.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
}

std::string str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Outcome ac1() {
    mie::MieConfig cfg;
    const auto r = mie::find_resonances(3, cfg, 0.1, 1.0, 1);
    const double rho = r[0].rho_res;
    return {std::abs(rho - 0.645) / 0.645 <= 0.01, "rho_res = " + str(rho) + ", radius = " + str(r[0].radius * 1e3) + " mm"};
}

Outcome ac2() {
    std::mt19937_64 rng(20);
    std::uniform_real_distribution<double> index(1.5, 10.0), size(0.3, 5.0);
    std::uniform_real_distribution<double> polar(0.02, kPi - 0.02), azimuth(0.0, kTwoPi);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        mie::MieConfig cfg;
        cfg.n1 = index(rng);
        cfg.radius = size(rng) / cfg.k_env();
        const mie::MieSolution sol(cfg);
        for (int k = 0; k < 20; ++k) {
            const double t = polar(rng), p = azimuth(rng);
            const auto in = sol.field(cfg.radius * (1.0 - 1e-13), t, p);
            const auto out = sol.field(cfg.radius * (1.0 + 1e-13), t, p);
            for (bool magnetic : {false, true}) {
                const auto& a = magnetic ? in.H : in.E;
                const auto& b = magnetic ? out.H : out.E;
                const double scale = std::max(a.norm(), b.norm());
                worst = std::max({worst, std::abs(a(1) - b(1)) / scale, std::abs(a(2) - b(2)) / scale});
            }
        }
    }
    return {worst < 1e-6, "max tangential mismatch = " + str(worst)};
}

Outcome ac3() {
    mie::MieConfig cfg;
    cfg.n1 = 1.0;
    double worst_amp = 0.0;
    for (double rho = 0.1; rho <= 10.0; rho += 0.1) {
        for (int n = 1; n <= 10; ++n) {
            const auto c = mie::mie_coefficients_at(n, rho, cfg);
            worst_amp = std::max({worst_amp, std::abs(c.a_ext), std::abs(c.b_ext)});
        }
    }
    const mie::MieSolution sol(cfg);
    std::mt19937_64 rng(30);
    std::uniform_real_distribution<double> radial(1.0, 5.0), polar(0.0, kPi), azimuth(0.0, kTwoPi);
    double worst_field = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double r = cfg.radius * radial(rng), t = polar(rng), p = azimuth(rng);
        const auto s = sol.field(r, t, p);
        const auto ref = mie::incident_plane_wave(cfg, r, t, p);
        worst_field = std::max({worst_field, (s.E - ref.E).norm() / ref.E.norm(),
                                (s.H - ref.H).norm() / ref.H.norm()});
    }
    return {worst_amp < 1e-12 && worst_field < 1e-10,
            "max |scattered amplitude| = " + str(worst_amp) + ", max field deviation = " + str(worst_field)};
}

Outcome ac4() {
    const double a = 13.5e-3, b = 8.5e-3;
    const double e2 = 1.0 - b * b / (a * a);
    auto f = [e2](double t) { return std::sqrt(1.0 - e2 * std::sin(t) * std::sin(t)); };
    const double arc = 4.0 * a * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kPi / 2.0, 15, 1e-14);
    const double err = std::abs(mie::ellipse_perimeter(a, b) - arc) / arc;
    const double circle = std::abs(mie::ellipse_perimeter(a, a) - kTwoPi * a);
    return {err < 1e-4 && circle < 1e-12, "relative error = " + str(err) + ", circle error = " + str(circle)};
}

Outcome ac5() {
    std::mt19937_64 rng(50);
    double worst = 0.0, worst_sum = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const auto sys = nv::build_system(testing::random_params(rng));
        const auto ss = nv::steady_state(sys);
        const auto te = nv::time_evolve(sys, nv::NvState::in_level(1), 10e-3, 1e-12);
        worst = std::max(worst, (ss.values() - te.values()).cwiseAbs().maxCoeff());
        worst_sum = std::max(worst_sum, std::abs(ss.total_population() - 1.0));
    }
    return {worst < 1e-6 && worst_sum < 1e-7,
            "max componentwise difference = " + str(worst) + ", max |sum p - 1| = " + str(worst_sum)};
}

Outcome ac6() {
    nv::NvModelParams p;
    std::vector<double> couplings;
    for (int k = 0; k <= 60; ++k) couplings.push_back(kTwoPi * 1e3 * std::pow(10.0, k / 10.0));
    const auto rows = nv::contrast_vs_coupling(p, couplings, {p.pump_rate});
    // rows run from 1 kHz to 1 GHz, ten per decade.
    // Undriven: PL on resonance against PL far off resonance.
    nv::NvModelParams on = p, off = p;
    on.coupling = off.coupling = 0.0;
    on.omega_mw = p.omega_12;
    off.omega_mw = p.omega_12 + kTwoPi * 1e9;
    const double c0 = 1.0 - nv::steady_pl(on) / nv::steady_pl(off);
    const bool zero = std::abs(c0) < 1e-12;
    bool increasing = true;
    for (int k = 1; k <= 10; ++k) increasing = increasing && rows[k].contrast > rows[k - 1].contrast;
    const double last = rows[60].contrast, decade_before = rows[50].contrast;
    const double drift = std::abs(last - decade_before) / last;
    const bool saturating = drift < 0.01 && last < 1.0;

    nv::NvModelParams d;
    d.omega_12 = d.omega_13 = kTwoPi * 2.87e9;
    double last_fwhm = 0.0, worst_sym = 0.0;
    bool broadening = true, single = true;
    for (double om : {0.1e6, 0.3e6, 1e6, 3e6}) {
        d.coupling = kTwoPi * om;
        const auto s = nv::odmr_spectrum(d, 2.77e9, 2.97e9, 801);
        const Eigen::Index n = s.size();
        const double fwhm = odmr::dip_fwhm(s.frequencies, s.pl, s.pl.maxCoeff());
        broadening = broadening && fwhm > 0.0 && fwhm >= last_fwhm;
        last_fwhm = fwhm;
        int minima = 0;
        for (Eigen::Index i = 1; i + 1 < n; ++i) {
            if (s.pl(i) < s.pl(i - 1) && s.pl(i) < s.pl(i + 1)) ++minima;
        }
        single = single && minima == 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            worst_sym = std::max(worst_sym, std::abs(s.pl(i) - s.pl(n - 1 - i)) / s.pl(i));
        }
    }
    const bool symmetric = worst_sym < 1e-6;
    std::ostringstream detail;
    detail << "C(0) = " << str(c0) << ", first decade increasing = " << increasing
           << ", last-decade drift = " << str(drift) << ", FWHM(3 MHz) = " << str(last_fwhm / 1e6)
           << " MHz, single dip = " << single << ", asymmetry = " << str(worst_sym);
    return {zero && increasing && saturating && broadening && single && symmetric, detail.str()};
}

Outcome ac7() {
    odmr::LorentzianParams truth;
    truth.dips[0] = {0.02, 2.865e9, 4e6};
    truth.dips[1] = {0.025, 2.875e9, 4e6};
    const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(801, 2.82e9, 2.92e9);
    const Eigen::VectorXd clean = odmr::double_lorentzian(f, truth);

    const auto fit = odmr::fit_spectrum(f, clean);
    const auto got = fit.params.pack(), want = truth.pack();
    const double param_err = ((got - want).cwiseQuotient(want)).cwiseAbs().maxCoeff();

    std::mt19937_64 rng(70);
    std::normal_distribution<double> noise(0.0, 0.005 * truth.baseline);
    std::vector<double> errors;
    double worst_grad = 0.0;
    for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd y = clean;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
        const auto nf = odmr::fit_spectrum(f, y);
        errors.push_back(std::abs(odmr::extract_contrast(nf) - 0.025) / 0.025);
        const auto g = odmr::rss_gradient(f, y, nf.params);
        worst_grad = std::max(worst_grad, g.cwiseAbs().maxCoeff() / y.squaredNorm());
    }
    std::nth_element(errors.begin(), errors.begin() + 50, errors.end());
    const double median = errors[50];
    return {fit.converged && param_err < 1e-6 && median < 0.05 && worst_grad < 1e-6,
            "noiseless parameter error = " + str(param_err) + ", median contrast error = " + str(median) +
                ", max scaled gradient = " + str(worst_grad)};
}

Outcome ac8() {
    nv::NvModelParams p;
    p.coupling = kTwoPi * 0.5e6;
    const auto s = nv::odmr_spectrum(p, 2.82e9, 2.92e9, 401);
    const auto fit = odmr::fit_spectrum(s);
    const double step = s.frequencies(1) - s.frequencies(0);
    const double c1 = fit.params.dips[0].center, c2 = fit.params.dips[1].center;
    const bool ok = fit.converged && std::abs(c1 - 2.865e9) <= step && std::abs(c2 - 2.875e9) <= step &&
                    std::abs((c2 - c1) - 10e6) <= step;
    return {ok, "centers = " + str(c1 / 1e9) + ", " + str(c2 / 1e9) + " GHz, splitting = " +
                    str((c2 - c1) / 1e6) + " MHz, step = " + str(step / 1e6) + " MHz"};
}

} // namespace

int main() {
    criterion("AC1", "third-order resonance size parameter", 1.0, ac1);
    criterion("AC2", "tangential field continuity", 10.0, ac2);
    criterion("AC3", "index-matched sphere null", 5.0, ac3);
    criterion("AC4", "ellipse perimeter", 1.0, ac4);
    criterion("AC5", "steady state vs time evolution", 60.0, ac5);
    criterion("AC6", "ODMR contrast and line shape properties", 120.0, ac6);
    criterion("AC7", "double-Lorentzian fit round trip", 60.0, ac7);
    criterion("AC8", "simulated spectrum fitted end to end", 30.0, ac8);
    std::printf("AC9 EXCLUDED  laboratory contrast enhancement and two-body field hotspot figures "
                "are not reproducible from the models here; documented in README\n");
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
