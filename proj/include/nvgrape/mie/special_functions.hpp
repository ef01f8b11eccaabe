#pragma once

// Spherical Bessel and Hankel functions of real or complex argument.
//
// j_n is computed by Miller's downward recurrence, normalised against the
// closed forms of j_0 or j_1 (whichever is larger in magnitude, so zeros of
// j_0 do not spoil the normalisation). y_n and h_n^(1) use upward
// recurrence, which is stable for the growing solutions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "nvgrape/errors.hpp"

namespace nvgrape::mie {

template <typename Scalar>
using SeriesVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

template <typename Scalar>
double magnitude(const Scalar& x) {
    return std::abs(x);
}

inline void check_order(int n) {
    if (n < 0) throw ConfigError("negative Bessel order " + std::to_string(n));
    if (n > 10000) throw NumericError("Bessel order too large: " + std::to_string(n));
}

} // namespace detail

// j_0..j_n at x, returned as a vector of length n + 1.
template <typename Scalar>
SeriesVector<Scalar> spherical_j_sequence(int n, const Scalar& x) {
    detail::check_order(n);
    SeriesVector<Scalar> out = SeriesVector<Scalar>::Zero(n + 1);
    const double ax = detail::magnitude(x);
    if (ax == 0.0) {
        out(0) = Scalar(1);
        return out;
    }
    if (!std::isfinite(ax)) throw NumericError("non-finite Bessel argument");

    // Power series near the origin, where the closed form for j_1 cancels.
    Scalar j0, j1;
    if (ax < 0.1) {
        const Scalar x2 = x * x;
        j0 = Scalar(1) - x2 / 6.0 * (Scalar(1) - x2 / 20.0 * (Scalar(1) - x2 / 42.0 * (Scalar(1) - x2 / 72.0)));
        j1 = x / 3.0 * (Scalar(1) - x2 / 10.0 * (Scalar(1) - x2 / 28.0 * (Scalar(1) - x2 / 54.0 * (Scalar(1) - x2 / 88.0))));
    } else {
        j0 = std::sin(x) / x;
        j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    }

    // Start well above both n and |x| so the dominant solution has died out.
    const int start = std::max(n, static_cast<int>(ax)) + 20 +
                      static_cast<int>(std::ceil(4.0 * std::cbrt(ax + 1.0)));
    Scalar above(0);
    Scalar current(1e-300);
    constexpr double kRescale = 1e250;
    for (int k = start; k >= 1; --k) {
        const Scalar below = Scalar(2.0 * k + 1.0) / x * current - above;
        above = current;
        current = below;
        if (k - 1 <= n) out(k - 1) = current;
        if (detail::magnitude(current) > kRescale) {
            current /= kRescale;
            above /= kRescale;
            out /= kRescale;
        }
    }
    // out(0) now holds the unnormalised j_0, out(1) j_1 (when n >= 1). Recover
    // the trial j_1 in the n == 0 case from the last step.
    const Scalar trial0 = current;
    const Scalar trial1 = above;
    Scalar scale;
    if (detail::magnitude(j0) >= detail::magnitude(j1)) {
        scale = j0 / trial0;
    } else {
        scale = j1 / trial1;
    }
    out *= scale;
    out(0) = j0;
    if (n >= 1) out(1) = j1;
    return out;
}

// y_0..y_n at x by upward recurrence.
template <typename Scalar>
SeriesVector<Scalar> spherical_y_sequence(int n, const Scalar& x) {
    detail::check_order(n);
    if (detail::magnitude(x) < 1e-12) {
        throw NumericError("spherical y_n / h_n evaluated at the pole x = 0");
    }
    SeriesVector<Scalar> out(n + 1);
    out(0) = -std::cos(x) / x;
    if (n >= 1) out(1) = -std::cos(x) / (x * x) - std::sin(x) / x;
    for (int k = 1; k < n; ++k) {
        out(k + 1) = Scalar(2.0 * k + 1.0) / x * out(k) - out(k - 1);
    }
    return out;
}

// h_0^(1)..h_n^(1) = j + i y.
template <typename Scalar>
SeriesVector<std::complex<double>> spherical_h1_sequence(int n, const Scalar& x) {
    const SeriesVector<Scalar> j = spherical_j_sequence(n, x);
    const SeriesVector<Scalar> y = spherical_y_sequence(n, x);
    const std::complex<double> i(0.0, 1.0);
    return j.template cast<std::complex<double>>() + i * y.template cast<std::complex<double>>();
}

template <typename Scalar>
Scalar spherical_bessel_j(int n, const Scalar& x) {
    return spherical_j_sequence(n, x)(n);
}

template <typename Scalar>
Scalar spherical_bessel_y(int n, const Scalar& x) {
    return spherical_y_sequence(n, x)(n);
}

template <typename Scalar>
std::complex<double> spherical_hankel_h1(int n, const Scalar& x) {
    return spherical_h1_sequence(n, x)(n);
}

// Given z_0..z_n at x, the Riccati derivatives d/dx[x z_k(x)] for k = 0..n,
// using x z_{k-1} - k z_k. For k = 0 the caller supplies x z_{-1}(x)
// (cos x for j, sin x for y, e^{ix} for h^(1)).
template <typename Scalar, typename ArgScalar>
SeriesVector<Scalar> riccati_derivative_sequence(const SeriesVector<Scalar>& z,
                                                 const ArgScalar& x,
                                                 const Scalar& x_times_z_minus1) {
    SeriesVector<Scalar> out(z.size());
    if (z.size() == 0) return out;
    out(0) = x_times_z_minus1;
    for (Eigen::Index k = 1; k < z.size(); ++k) {
        out(k) = Scalar(x) * z(k - 1) - Scalar(static_cast<double>(k)) * z(k);
    }
    return out;
}

enum class RiccatiKind { BesselJ, HankelH1 };

// d/dx [x z_n(x)] for z = j_n or h_n^(1).
template <typename Scalar>
std::complex<double> riccati_derivative(RiccatiKind kind, int n, const Scalar& x) {
    using C = std::complex<double>;
    const C xc(x);
    if (kind == RiccatiKind::BesselJ) {
        const auto j = spherical_j_sequence(n, x).template cast<C>().eval();
        return riccati_derivative_sequence<C>(j, xc, std::cos(xc))(n);
    }
    const auto h = spherical_h1_sequence(n, x);
    return riccati_derivative_sequence<C>(h, xc, std::exp(C(0.0, 1.0) * xc))(n);
}

} // namespace nvgrape::mie
