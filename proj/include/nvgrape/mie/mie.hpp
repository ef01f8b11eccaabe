#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "nvgrape/constants.hpp"

namespace nvgrape::mie {

using Complex = std::complex<double>;

// Homogeneous sphere in a lossless environment, illuminated by an
// x-polarised plane wave travelling along +z with unit amplitude.
struct MieConfig {
    Complex n1{8.9, 0.0};     // sphere refractive index
    double n2 = 1.0;          // environment refractive index
    double mu1 = 1.0;         // relative permeabilities
    double mu2 = 1.0;
    double radius = 10.7e-3;  // m
    double frequency = 2.87e9;  // Hz
    // Series truncation; when unset, ceil(rho + 4 rho^(1/3) + 2), at least 10.
    std::optional<int> n_max;

    void validate() const;

    double wavelength() const { return kSpeedOfLight / frequency; }  // vacuum
    double k_env() const { return kTwoPi * frequency * n2 / kSpeedOfLight; }
    Complex k_sphere() const { return kTwoPi * frequency * n1 / kSpeedOfLight; }
    double size_parameter() const { return k_env() * radius; }
    Complex relative_index() const { return n1 / n2; }
    int truncation() const;
};

// Default series truncation for a given size parameter.
int default_truncation(double rho);

struct MieCoefficients {
    int order = 0;
    Complex a_int, b_int, a_ext, b_ext;
};

// Shared denominator of a_int and a_ext at size parameter rho:
//   mu1 j_n(N rho) [rho h_n(rho)]' - mu2 h_n(rho) [N rho j_n(N rho)]'.
// Uses cfg for N and the permeabilities only.
Complex characteristic_fn(int n, double rho, const MieConfig& cfg);

// Internal and external (scattered) multipole amplitudes. The external pair
// multiplies outgoing Hankel-type harmonics; with Bohren-Huffman's
// (a_n, b_n, c_n, d_n) they are a_int = c_n, b_int = d_n, a_ext = -b_n,
// b_ext = -a_n.
MieCoefficients mie_coefficients(int n, const MieConfig& cfg);

// As above at an explicit size parameter, ignoring cfg.radius/frequency.
MieCoefficients mie_coefficients_at(int n, double rho, const MieConfig& cfg);

struct ResonanceResult {
    int order = 0;
    int mode_index = 0;    // 1-based, ascending rho
    double rho_res = 0.0;
    double radius = 0.0;   // m, at cfg.frequency
    double alpha = 0.0;    // circumference / wavelength = rho_res
    double residual = 0.0; // |D_n(rho_res)|
};

struct ResonanceScan {
    int grid_points = 4000;
    double tolerance = 1e-8;  // golden-section bracket width on rho
};

// First mode_count local minima of |D_n(rho)| on [rho_min, rho_max],
// refined by golden-section search. Throws NumericError listing what was
// found if there are fewer minima than requested.
std::vector<ResonanceResult> find_resonances(int n, const MieConfig& cfg, double rho_min,
                                             double rho_max, int mode_count,
                                             const ResonanceScan& scan = {});

} // namespace nvgrape::mie
