#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

#include "nvgrape/nv/odmr.hpp"

namespace nvgrape::odmr {

struct Dip {
    double amplitude = 0.0;  // PL units, subtracted from the baseline
    double center = 0.0;     // Hz
    double hwhm = 1.0;       // Hz
};

struct LorentzianParams {
    double baseline = 1.0;
    std::array<Dip, 2> dips{};

    // Packed as [B, A1, c1, w1, A2, c2, w2].
    Eigen::Matrix<double, 7, 1> pack() const;
    static LorentzianParams unpack(const Eigen::Matrix<double, 7, 1>& v);
};

// B - A1 w1^2 / ((f - c1)^2 + w1^2) - A2 w2^2 / ((f - c2)^2 + w2^2)
double double_lorentzian(double f, const LorentzianParams& p);
Eigen::VectorXd double_lorentzian(const Eigen::VectorXd& f, const LorentzianParams& p);

struct LorentzianFit {
    LorentzianParams params;
    Eigen::Matrix<double, 7, 7> covariance = Eigen::Matrix<double, 7, 7>::Zero();
    double rss = 0.0;
    double contrast_1 = 0.0;  // A1 / B, dips ordered by centre
    double contrast_2 = 0.0;
    bool converged = false;
    bool degenerate = false;  // flat input; zero-amplitude result
    int iterations = 0;
};

struct FitOptions {
    int max_iterations = 200;
    double rss_rtol = 1e-10;
    double initial_hwhm = 5e6;          // Hz
    double min_separation_factor = 3.0;  // x initial hwhm between seed centres
};

// Levenberg-Marquardt fit of the double-Lorentzian model with equal
// weights. Without init, seeds from the data: baseline from the top
// quartile, centres from the two deepest separated minima. When the
// preferred and the one-hwhm separation rules pick different second
// centres, both are fitted and the lower residual wins.
LorentzianFit fit_spectrum(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& pl,
                           const std::optional<LorentzianParams>& init = std::nullopt,
                           const FitOptions& options = {});
LorentzianFit fit_spectrum(const nv::OdmrSpectrum& spectrum,
                           const std::optional<LorentzianParams>& init = std::nullopt,
                           const FitOptions& options = {});

// The automatic starting point used by fit_spectrum.
LorentzianParams initial_guess(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& pl,
                               const FitOptions& options = {});

struct ContrastSummary {
    double contrast_1 = 0.0;
    double contrast_2 = 0.0;
    double deeper = 0.0;
    double mean = 0.0;
    double summed = 0.0;
};

ContrastSummary contrast_summary(const LorentzianFit& fit);

// Contrast of the deeper dip. Throws NumericError for unconverged fits
// unless force is set.
double extract_contrast(const LorentzianFit& fit, bool force = false);

// Gradient of the residual sum of squares with respect to log-scaled
// parameters (p_i dRSS/dp_i), by central differences.
Eigen::Matrix<double, 7, 1> rss_gradient(const Eigen::VectorXd& frequencies,
                                         const Eigen::VectorXd& pl, const LorentzianParams& p,
                                         double rel_step = 1e-6);

double residual_sum_of_squares(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& pl,
                               const LorentzianParams& p);

// Full width at half depth of the deepest dip below a reference level,
// by linear interpolation between samples. Returns 0 when the dip does
// not cross half depth on both sides inside the window.
double dip_fwhm(const Eigen::VectorXd& frequencies, const Eigen::VectorXd& pl, double baseline);

} // namespace nvgrape::odmr
