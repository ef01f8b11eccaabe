#include "doctest.h"

#include <cmath>

#include "nvgrape/errors.hpp"
#include "nvgrape/nv/odmr.hpp"

using namespace nvgrape;
using nv::NvModelParams;

TEST_CASE("undriven spectrum is flat") {
    NvModelParams p;
    const auto s = nv::odmr_spectrum(p, 2.84e9, 2.90e9, 61);
    const double max = s.pl.maxCoeff();
    CHECK((max - s.pl.minCoeff()) / max < 1e-9);
    CHECK_NOTHROW(s.validate());
}

TEST_CASE("normalised spectrum peaks at one") {
    NvModelParams p;
    p.coupling = kTwoPi * 1e6;
    const auto s = nv::odmr_spectrum(p, 2.84e9, 2.90e9, 61, true);
    CHECK(s.pl.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("degenerate transitions give a mirror-symmetric spectrum") {
    NvModelParams p;
    p.omega_12 = kTwoPi * 2.87e9;
    p.omega_13 = kTwoPi * 2.87e9;
    p.coupling = kTwoPi * 1e6;
    const auto s = nv::odmr_spectrum(p, 2.85e9, 2.89e9, 201);
    const Eigen::Index n = s.size();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(s.pl(i) - s.pl(n - 1 - i)) / s.pl(i));
    }
    CHECK(worst < 1e-6);
    Eigen::Index imin;
    s.pl.minCoeff(&imin);
    CHECK(imin == n / 2);
}

TEST_CASE("split transitions give two dips at the transition frequencies") {
    NvModelParams p;
    p.coupling = kTwoPi * 0.5e6;
    const auto s = nv::odmr_spectrum(p, 2.85e9, 2.89e9, 401);
    const Eigen::Index half = s.size() / 2;
    Eigen::Index lo, hi;
    s.pl.head(half).minCoeff(&lo);
    s.pl.tail(s.size() - half).minCoeff(&hi);
    hi += half;
    const double step = s.frequencies(1) - s.frequencies(0);
    CHECK(std::abs(s.frequencies(lo) - 2.865e9) <= step);
    CHECK(std::abs(s.frequencies(hi) - 2.875e9) <= step);
}

TEST_CASE("contrast versus coupling") {
    NvModelParams p;
    std::vector<double> couplings;
    for (int k = 0; k <= 30; ++k) couplings.push_back(kTwoPi * 1e3 * std::pow(10.0, k / 10.0));
    const auto rows = nv::contrast_vs_coupling(p, couplings, {kTwoPi * 2e6, kTwoPi * 0.5e6});

    REQUIRE(rows.size() == 62);
    CHECK(rows.front().pump_rate == kTwoPi * 0.5e6);
    CHECK(rows.front().contrast < 1e-5);

    // Monotone prefix over the low-coupling decades at each pump rate.
    for (std::size_t block = 0; block < 2; ++block) {
        for (std::size_t k = 1; k <= 20; ++k) {
            const auto& prev = rows[block * 31 + k - 1];
            const auto& cur = rows[block * 31 + k];
            CHECK(cur.coupling > prev.coupling);
            CHECK(cur.contrast > prev.contrast);
        }
    }
    CHECK_THROWS_AS(nv::contrast_vs_coupling(p, {}, {1.0}), ConfigError);
    CHECK_THROWS_AS(nv::contrast_vs_coupling(p, {0.0}, {1.0}), ConfigError);
}

TEST_CASE("stronger coupling gives deeper and broader dips") {
    NvModelParams p;
    p.omega_13 = p.omega_12;
    double last_depth = 0.0;
    for (double om : {0.1e6, 0.3e6, 1e6, 3e6}) {
        p.coupling = kTwoPi * om;
        const auto s = nv::odmr_spectrum(p, 2.80e9, 2.93e9, 261);
        const double depth = 1.0 - s.pl.minCoeff() / s.pl.maxCoeff();
        CHECK(depth > last_depth);
        last_depth = depth;
    }
}

TEST_CASE("spectrum argument validation") {
    NvModelParams p;
    CHECK_THROWS_AS(nv::odmr_spectrum(p, 2.9e9, 2.8e9, 10), ConfigError);
    CHECK_THROWS_AS(nv::odmr_spectrum(p, 2.8e9, 2.9e9, 1), ConfigError);
}

TEST_CASE("solver failures carry the offending frequency") {
    NvModelParams p;
    p.pump_rate = 0.0;
    p.dephasing_rate = 0.0;
    p.gamma_sp = 0.0;
    p.gamma_sp0 = 0.0;
    p.isc = {0.0, 0.0, 0.0};
    p.singlet_decay = {0.0, 0.0, 0.0};
    p.gamma_12 = 0.0;
    p.gamma_21 = 0.0;
    try {
        nv::odmr_spectrum(p, 2.8e9, 2.9e9, 3);
        FAIL("expected a NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("2800000000 Hz") != std::string::npos);
    }
}
