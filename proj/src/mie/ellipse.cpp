#include "nvgrape/mie/ellipse.hpp"

#include <cmath>
#include <sstream>

#include "nvgrape/constants.hpp"
#include "nvgrape/errors.hpp"

namespace nvgrape::mie {

double ellipse_perimeter(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(b >= 0.0) || !(a >= b) || !(a > 0.0)) {
        throw ConfigError("ellipse semi-axes must satisfy a >= b >= 0 and a > 0");
    }
    const double s = a + b;
    const double h = (a - b) * (a - b) / (s * s);
    return kPi * s * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

double size_ellipsoid(double a, double alpha, double frequency, double tolerance) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw ConfigError("frequency must be positive");
    }
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("semi-major axis must be positive");

    const double target = alpha * kSpeedOfLight / frequency;
    const double c_min = ellipse_perimeter(a, 0.0);
    const double c_max = ellipse_perimeter(a, a);
    if (target > c_max * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "no solution: target perimeter " << target << " m exceeds the circle perimeter "
            << c_max << " m for a = " << a << " m";
        throw NumericError(msg.str());
    }
    if (target <= c_min) {
        std::ostringstream msg;
        msg << "no solution: target perimeter " << target << " m is at or below the degenerate "
            << "limit " << c_min << " m for a = " << a << " m";
        throw NumericError(msg.str());
    }

    if (target >= c_max) return a;

    // Perimeter is increasing in b on [0, a].
    double lo = 0.0, hi = a;
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (ellipse_perimeter(a, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace nvgrape::mie
