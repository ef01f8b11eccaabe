#include "nvgrape/nv/odmr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nvgrape/errors.hpp"
#include "nvgrape/nv/dynamics.hpp"

namespace nvgrape::nv {

void OdmrSpectrum::validate() const {
    if (frequencies.size() != pl.size()) {
        throw ConfigError("spectrum arrays differ in length");
    }
    for (Eigen::Index i = 0; i < frequencies.size(); ++i) {
        if (!std::isfinite(frequencies(i)) || !std::isfinite(pl(i))) {
            throw ConfigError("spectrum contains non-finite values");
        }
        if (i > 0 && !(frequencies(i) > frequencies(i - 1))) {
            throw ConfigError("spectrum frequencies are not strictly increasing at index " +
                              std::to_string(i));
        }
        if (!(pl(i) > 0.0)) {
            throw ConfigError("spectrum PL is not positive at index " + std::to_string(i));
        }
    }
}

double steady_pl(const NvModelParams& params) {
    return photoluminescence(steady_state(build_system(params)), params);
}

OdmrSpectrum odmr_spectrum(const NvModelParams& params, const Eigen::VectorXd& frequencies,
                           bool normalize) {
    params.validate();
    OdmrSpectrum out;
    out.frequencies = frequencies;
    out.pl.resize(frequencies.size());
    out.params = params;

    NvModelParams p = params;
    for (Eigen::Index i = 0; i < frequencies.size(); ++i) {
        if (i > 0 && !(frequencies(i) > frequencies(i - 1))) {
            throw ConfigError("drive frequencies must be strictly increasing");
        }
        p.omega_mw = kTwoPi * frequencies(i);
        try {
            out.pl(i) = steady_pl(p);
        } catch (const NumericError& e) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "at drive frequency " << frequencies(i) << " Hz: " << e.what();
            throw NumericError(msg.str());
        }
    }
    if (normalize && out.pl.size() > 0) {
        const double peak = out.pl.maxCoeff();
        if (peak > 0.0) out.pl /= peak;
    }
    return out;
}

OdmrSpectrum odmr_spectrum(const NvModelParams& params, double f_start, double f_stop,
                           int n_points, bool normalize) {
    if (!(f_start < f_stop) || !std::isfinite(f_start) || !std::isfinite(f_stop)) {
        throw ConfigError("f_start must be below f_stop");
    }
    if (n_points < 2) {
        throw ConfigError("n_points must be at least 2");
    }
    Eigen::VectorXd grid(n_points);
    const double step = (f_stop - f_start) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) grid(i) = f_start + step * i;
    grid(n_points - 1) = f_stop;
    return odmr_spectrum(params, grid, normalize);
}

std::vector<ContrastPoint> contrast_vs_coupling(const NvModelParams& params,
                                                std::vector<double> couplings,
                                                std::vector<double> pump_rates) {
    if (couplings.empty() || pump_rates.empty()) {
        throw ConfigError("coupling and pump-rate lists must be non-empty");
    }
    for (double x : couplings) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("couplings must be positive");
    }
    for (double x : pump_rates) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("pump rates must be positive");
    }
    std::sort(couplings.begin(), couplings.end());
    std::sort(pump_rates.begin(), pump_rates.end());

    std::vector<ContrastPoint> rows;
    rows.reserve(couplings.size() * pump_rates.size());
    for (double pump : pump_rates) {
        NvModelParams p = params;
        p.pump_rate = pump;
        p.omega_mw = p.omega_12;
        p.coupling = 0.0;
        const double baseline = steady_pl(p);
        for (double om : couplings) {
            p.coupling = om;
            rows.push_back({pump, om, 1.0 - steady_pl(p) / baseline});
        }
    }
    return rows;
}

} // namespace nvgrape::nv
