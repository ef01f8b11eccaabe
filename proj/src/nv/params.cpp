#include "nvgrape/nv/params.hpp"

#include <cmath>
#include <string>

#include "nvgrape/errors.hpp"

namespace nvgrape::nv {

namespace {

void require_rate(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw ConfigError(std::string("non-finite value for ") + name);
    }
    if (value < 0.0) {
        throw ConfigError(std::string("negative rate for ") + name);
    }
}

void require_frequency(double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
        throw ConfigError(std::string(name) + " must be finite and positive");
    }
}

} // namespace

void NvModelParams::validate() const {
    require_rate(pump_rate, "pump_rate");
    require_rate(dephasing_rate, "dephasing_rate");
    require_frequency(omega_12, "omega_12");
    require_frequency(omega_13, "omega_13");
    require_frequency(omega_mw, "omega_mw");
    require_rate(coupling, "coupling");
    require_rate(gamma_sp, "gamma_sp");
    require_rate(gamma_sp0, "gamma_sp0");
    for (double r : isc) require_rate(r, "isc");
    for (double r : singlet_decay) require_rate(r, "singlet_decay");
    require_rate(nv0_pump_ratio, "nv0_pump_ratio");
    require_rate(ionisation_ratio, "ionisation_ratio");
    require_rate(recombination_ratio, "recombination_ratio");
    if (lambda_0) require_rate(*lambda_0, "lambda_0");
    if (ionisation) {
        for (double r : *ionisation) require_rate(r, "ionisation");
    }
    if (recombination) {
        for (double r : *recombination) require_rate(r, "recombination");
    }
    require_rate(gamma_12, "gamma_12");
    require_rate(gamma_21, "gamma_21");
    if (gamma_13) require_rate(*gamma_13, "gamma_13");
    if (gamma_31) require_rate(*gamma_31, "gamma_31");
    require_rate(gamma_s, "gamma_s");
    if (temperature_k) require_frequency(*temperature_k, "temperature_k");
}

double thermal_occupation(double omega, double temperature_k) {
    return 1.0 / std::expm1(kHbar * omega / (kBoltzmann * temperature_k));
}

RateTable resolve_rates(const NvModelParams& p) {
    p.validate();
    RateTable r{};
    r.pump = p.pump_rate;
    r.lambda_0 = p.lambda_0.value_or(p.nv0_pump_ratio * p.pump_rate);
    r.gamma_sp = p.gamma_sp;
    r.gamma_sp0 = p.gamma_sp0;
    r.dephasing = p.dephasing_rate;
    r.isc = p.isc;
    r.singlet_decay = p.singlet_decay;
    const double ion = p.ionisation_ratio * p.pump_rate;
    const double rec = p.recombination_ratio * p.pump_rate;
    r.ionisation = p.ionisation.value_or(std::array<double, 3>{ion, ion, ion});
    r.recombination = p.recombination.value_or(std::array<double, 3>{rec, rec, rec});

    if (p.temperature_k) {
        const double n12 = thermal_occupation(p.omega_12, *p.temperature_k);
        const double n13 = thermal_occupation(p.omega_13, *p.temperature_k);
        r.g12 = p.gamma_s * (1.0 + n12);
        r.g21 = p.gamma_s * n12;
        r.g13 = p.gamma_s * (1.0 + n13);
        r.g31 = p.gamma_s * n13;
    } else {
        r.g12 = p.gamma_12;
        r.g21 = p.gamma_21;
        r.g13 = p.gamma_13.value_or(p.gamma_12);
        r.g31 = p.gamma_31.value_or(p.gamma_21);
    }
    return r;
}

} // namespace nvgrape::nv
