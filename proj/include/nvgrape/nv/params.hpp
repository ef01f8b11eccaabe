#pragma once

#include <array>
#include <optional>

#include "nvgrape/constants.hpp"

namespace nvgrape::nv {

// Level labels of the nine-level NV model.
//   1..3  NV- ground triplet (ms = 0, -1, +1)
//   4..6  NV- excited triplet (ms = 0, -1, +1)
//   7     NV- metastable singlet
//   8, 9  NV0 ground / excited
inline constexpr int kLevels = 9;

// Every entry is an angular rate or frequency in rad/s.
//
// Rates documented as proportional to the pump (NV0 pump, ionisation,
// recombination) follow pump_rate unless an explicit override is set, so
// that sweeping the pump rescales them the way the literature values do.
struct NvModelParams {
    double pump_rate = kTwoPi * 1.0e6;       // Lambda, GS -> ES
    double dephasing_rate = kTwoPi * 4.0e6;  // Gamma_d on levels 2 and 3
    double omega_12 = kTwoPi * 2.865e9;      // ms=0 -> ms=-1
    double omega_13 = kTwoPi * 2.875e9;      // ms=0 -> ms=+1
    double omega_mw = kTwoPi * 2.865e9;
    double coupling = 0.0;                   // Omega = gamma_e |B| / 2

    double gamma_sp = kTwoPi * 66.16e6;
    double gamma_sp0 = kTwoPi * 50.0e6;

    // ES -> singlet, indexed by ES level (4, 5, 6).
    std::array<double, 3> isc = {kTwoPi * 11.1e6, kTwoPi * 91.8e6, kTwoPi * 91.8e6};
    // singlet -> GS, indexed by GS level (1, 2, 3).
    std::array<double, 3> singlet_decay = {kTwoPi * 4.87e6, kTwoPi * 2.04e6, kTwoPi * 2.04e6};

    double nv0_pump_ratio = 1.3;
    double ionisation_ratio = 0.037;
    double recombination_ratio = 0.08;
    std::optional<double> lambda_0;
    std::optional<std::array<double, 3>> ionisation;     // gamma_84, gamma_85, gamma_86
    std::optional<std::array<double, 3>> recombination;  // gamma_19, gamma_29, gamma_39

    // Longitudinal spin relaxation. gamma_12 is ms=-1 -> ms=0, gamma_21 the reverse.
    double gamma_12 = kTwoPi * 344.96;
    double gamma_21 = kTwoPi * 343.8;
    std::optional<double> gamma_13;  // defaults to gamma_12
    std::optional<double> gamma_31;  // defaults to gamma_21

    // When set, thermal rates are recomputed from gamma_s and the Bose
    // occupation at this temperature instead of the fixed values above.
    std::optional<double> temperature_k;
    double gamma_s = kTwoPi * 0.157;

    // Add NV0 emission Gamma_sp0 * p9 to the photoluminescence observable.
    bool include_nv0_emission = false;

    double detuning_12() const { return omega_12 - omega_mw; }
    double detuning_13() const { return omega_13 - omega_mw; }

    // Throws ConfigError naming the first offending field.
    void validate() const;
};

// Fully resolved rate table, everything in rad/s. Index convention
// follows the level labels: rate(i, j) is the j -> i transition.
struct RateTable {
    double pump, lambda_0, gamma_sp, gamma_sp0, dephasing;
    double g12, g21, g13, g31;
    std::array<double, 3> isc, singlet_decay, ionisation, recombination;
};

RateTable resolve_rates(const NvModelParams& params);

// Bose occupation of a mode at angular frequency omega.
double thermal_occupation(double omega, double temperature_k);

} // namespace nvgrape::nv
