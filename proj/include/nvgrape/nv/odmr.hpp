#pragma once

#include <vector>

#include <Eigen/Core>

#include "nvgrape/nv/params.hpp"

namespace nvgrape::nv {

// Photoluminescence sampled against microwave drive frequency.
struct OdmrSpectrum {
    Eigen::VectorXd frequencies;  // Hz, strictly increasing
    Eigen::VectorXd pl;           // photons/s, arbitrary normalisation
    NvModelParams params;

    Eigen::Index size() const { return frequencies.size(); }
    // Throws ConfigError if the invariants above do not hold.
    void validate() const;
};

// Uniform grid f_start..f_stop inclusive. Each point sets
// omega_mw = 2 pi f and takes the steady-state PL.
OdmrSpectrum odmr_spectrum(const NvModelParams& params, double f_start, double f_stop,
                           int n_points, bool normalize = false);

// Same as above on an arbitrary increasing grid.
OdmrSpectrum odmr_spectrum(const NvModelParams& params, const Eigen::VectorXd& frequencies,
                           bool normalize = false);

// Steady-state PL at the configured drive frequency.
double steady_pl(const NvModelParams& params);

struct ContrastPoint {
    double pump_rate;
    double coupling;
    double contrast;
};

// contrast = 1 - PL(omega_mw = omega_12) / PL(Omega = 0) for each
// (pump, coupling) pair. Rows are sorted by pump rate, then coupling.
std::vector<ContrastPoint> contrast_vs_coupling(const NvModelParams& params,
                                                std::vector<double> couplings,
                                                std::vector<double> pump_rates);

} // namespace nvgrape::nv
