#pragma once

#include <random>

#include "nvgrape/nv/params.hpp"

namespace nvgrape::testing {

// Every rate scaled by an independent factor in [0.5, 1.5]; moderate drive
// near the lower spin transition.
inline nv::NvModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> factor(0.5, 1.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    nv::NvModelParams p;
    p.pump_rate *= factor(rng);
    p.dephasing_rate *= factor(rng);
    p.gamma_sp *= factor(rng);
    p.gamma_sp0 *= factor(rng);
    for (double& r : p.isc) r *= factor(rng);
    for (double& r : p.singlet_decay) r *= factor(rng);
    p.nv0_pump_ratio *= factor(rng);
    p.ionisation_ratio *= factor(rng);
    p.recombination_ratio *= factor(rng);
    p.gamma_12 *= factor(rng);
    p.gamma_21 *= factor(rng);
    p.coupling = kTwoPi * 2.0e6 * unit(rng);
    p.omega_mw = p.omega_12 + kTwoPi * 20.0e6 * (unit(rng) - 0.5);
    return p;
}

} // namespace nvgrape::testing
