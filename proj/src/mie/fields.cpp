#include "nvgrape/mie/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nvgrape/errors.hpp"
#include "nvgrape/mie/special_functions.hpp"

namespace nvgrape::mie {

void angular_functions(int n_max, double mu, Eigen::VectorXd& pi, Eigen::VectorXd& tau) {
    pi = Eigen::VectorXd::Zero(n_max + 1);
    tau = Eigen::VectorXd::Zero(n_max + 1);
    if (n_max < 1) return;
    pi(1) = 1.0;
    tau(1) = mu;
    for (int n = 2; n <= n_max; ++n) {
        pi(n) = ((2.0 * n - 1.0) * mu * pi(n - 1) - n * pi(n - 2)) / (n - 1.0);
        tau(n) = n * mu * pi(n) - (n + 1.0) * pi(n - 1);
    }
}

namespace {

// Extra orders beyond the coefficient rule so the Bessel series for the
// fields converge to double precision.
constexpr int kFieldMargin = 20;

} // namespace

MieSolution::MieSolution(const MieConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    omega_ = kTwoPi * cfg_.frequency;
    const double rho = cfg_.size_parameter();
    const int n_max = cfg_.n_max ? *cfg_.n_max : default_truncation(rho) + kFieldMargin;
    coeffs_.reserve(n_max);
    for (int n = 1; n <= n_max; ++n) coeffs_.push_back(mie_coefficients_at(n, rho, cfg_));
}

namespace {

// z_n(x), z_n(x)/x and [x z_n(x)]'/x for n = 0..n_max.
struct RadialTerms {
    Eigen::VectorXcd z, z_over_x, dz_over_x;
};

enum class Radial { Bessel, Hankel };

RadialTerms radial_terms(Radial kind, int n_max, Complex x) {
    RadialTerms out;
    out.z = Eigen::VectorXcd::Zero(n_max + 1);
    out.z_over_x = Eigen::VectorXcd::Zero(n_max + 1);
    out.dz_over_x = Eigen::VectorXcd::Zero(n_max + 1);
    const Complex i(0.0, 1.0);
    if (std::abs(x) == 0.0) {
        if (kind == Radial::Hankel) throw NumericError("outgoing field evaluated at r = 0");
        out.z(0) = 1.0;
        if (n_max >= 1) {
            out.z_over_x(1) = 1.0 / 3.0;
            out.dz_over_x(1) = 2.0 / 3.0;
        }
        return out;
    }
    Eigen::VectorXcd dz;
    if (kind == Radial::Bessel) {
        out.z = (x.imag() == 0.0) ? spherical_j_sequence(n_max, x.real()).cast<Complex>().eval()
                                  : spherical_j_sequence(n_max, x);
        dz = riccati_derivative_sequence<Complex>(out.z, x, std::cos(x));
    } else {
        if (x.imag() != 0.0) throw NumericError("outgoing field needs a real environment index");
        out.z = spherical_h1_sequence(n_max, x.real());
        dz = riccati_derivative_sequence<Complex>(out.z, x, std::exp(i * x));
    }
    out.z_over_x = out.z / x;
    out.dz_over_x = dz / x;
    return out;
}

// Accumulates sum_n E_n (p_n M_o1n - i q_n N_e1n) for E and
// sum_n E_n (q_n M_e1n + i p_n N_o1n) for H (prefactor applied by caller).
void accumulate(const RadialTerms& rt, const Eigen::VectorXd& pi, const Eigen::VectorXd& tau,
                double sin_t, double sin_p, double cos_p, int n_max,
                const std::vector<Complex>& p, const std::vector<Complex>& q, Vector3c& e,
                Vector3c& h) {
    const Complex i(0.0, 1.0);
    Complex in = i;  // i^n
    for (int n = 1; n <= n_max; ++n, in *= i) {
        const double nn1 = n * (n + 1.0);
        const Complex en = in * (2.0 * n + 1.0) / nn1;
        const Complex z = rt.z(n);
        const Complex zr = rt.z_over_x(n);
        const Complex dzr = rt.dz_over_x(n);

        const Vector3c m_o(0.0, cos_p * pi(n) * z, -sin_p * tau(n) * z);
        const Vector3c m_e(0.0, -sin_p * pi(n) * z, -cos_p * tau(n) * z);
        const Vector3c n_o(sin_p * nn1 * sin_t * pi(n) * zr, sin_p * tau(n) * dzr,
                           cos_p * pi(n) * dzr);
        const Vector3c n_e(cos_p * nn1 * sin_t * pi(n) * zr, cos_p * tau(n) * dzr,
                           -sin_p * pi(n) * dzr);

        const Complex pn = p[n - 1];
        const Complex qn = q[n - 1];
        e += en * (pn * m_o - i * qn * n_e);
        h += en * (qn * m_e + i * pn * n_o);
    }
}

} // namespace

FieldSample MieSolution::field(double r, double theta, double phi, FieldPart part) const {
    if (!std::isfinite(r) || r < 0.0 || !std::isfinite(theta) || !std::isfinite(phi)) {
        throw ConfigError("field point must have finite coordinates with r >= 0");
    }
    FieldSample s;
    s.r = r;
    s.theta = theta;
    s.phi = phi;

    const double R = cfg_.radius;
    const double k2 = cfg_.k_env();
    const double sin_t = std::sin(theta);
    const double sin_p = std::sin(phi);
    const double cos_p = std::cos(phi);
    const double mu0 = kMu0;

    const bool inside = r < R;
    if (inside && part == FieldPart::Scattered) return s;

    int n_max = terms();
    std::vector<Complex> p(n_max), q(n_max);
    if (!inside && !cfg_.n_max) {
        // Far points need more terms for the incident expansion.
        n_max = std::max(n_max, default_truncation(k2 * r) + kFieldMargin);
    }
    Eigen::VectorXd pi, tau;
    angular_functions(n_max, std::cos(theta), pi, tau);

    // Orders beyond the stored coefficients (far points only).
    auto coeff = [&](int n) -> MieCoefficients {
        if (n <= terms()) return coeffs_[n - 1];
        return mie_coefficients_at(n, cfg_.size_parameter(), cfg_);
    };

    if (inside) {
        const Complex k1 = cfg_.k_sphere();
        const RadialTerms rt = radial_terms(Radial::Bessel, n_max, k1 * r);
        for (int n = 1; n <= n_max; ++n) {
            p[n - 1] = coeff(n).a_int;
            q[n - 1] = coeff(n).b_int;
        }
        Vector3c h = Vector3c::Zero();
        accumulate(rt, pi, tau, sin_t, sin_p, cos_p, n_max, p, q, s.E, h);
        s.H = -(k1 / (omega_ * cfg_.mu1 * mu0)) * h;
        return s;
    }

    const Complex h_pref = -(k2 / (omega_ * cfg_.mu2 * mu0));
    p.resize(n_max);
    q.resize(n_max);
    {
        const RadialTerms rt = radial_terms(Radial::Hankel, n_max, Complex(k2 * r));
        for (int n = 1; n <= n_max; ++n) {
            const MieCoefficients c = coeff(n);
            p[n - 1] = c.a_ext;
            q[n - 1] = c.b_ext;
        }
        Vector3c h = Vector3c::Zero();
        accumulate(rt, pi, tau, sin_t, sin_p, cos_p, n_max, p, q, s.E, h);
        s.H = h_pref * h;
    }
    if (part == FieldPart::Total) {
        const RadialTerms rt = radial_terms(Radial::Bessel, n_max, Complex(k2 * r));
        std::fill(p.begin(), p.end(), Complex(1.0));
        std::fill(q.begin(), q.end(), Complex(1.0));
        Vector3c e = Vector3c::Zero();
        Vector3c h = Vector3c::Zero();
        accumulate(rt, pi, tau, sin_t, sin_p, cos_p, n_max, p, q, e, h);
        s.E += e;
        s.H += h_pref * h;
    }
    return s;
}

FieldSample field_at_point(const MieConfig& cfg, double r, double theta, double phi) {
    return MieSolution(cfg).field(r, theta, phi);
}

FieldSample incident_plane_wave(const MieConfig& cfg, double r, double theta, double phi) {
    cfg.validate();
    const double k2 = cfg.k_env();
    const double omega = kTwoPi * cfg.frequency;
    const Complex phase = std::exp(Complex(0.0, k2 * r * std::cos(theta)));
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    FieldSample s;
    s.r = r;
    s.theta = theta;
    s.phi = phi;
    s.E = Vector3c(st * cp, ct * cp, -sp) * phase;
    s.H = Vector3c(st * sp, ct * sp, cp) * (phase * k2 / (omega * cfg.mu2 * kMu0));
    return s;
}

Eigen::Vector3d plane_point(Plane plane, double u, double v) {
    switch (plane) {
    case Plane::XY: return {u, v, 0.0};
    case Plane::XZ: return {u, 0.0, v};
    case Plane::YZ: return {0.0, u, v};
    }
    return {u, v, 0.0};
}

namespace {

FieldSample field_cartesian(const MieSolution& sol, const Eigen::Vector3d& x) {
    const double r = x.norm();
    const double theta = r > 0.0 ? std::acos(std::clamp(x.z() / r, -1.0, 1.0)) : 0.0;
    const double phi = std::atan2(x.y(), x.x());
    return sol.field(r, theta, phi);
}

} // namespace

FieldMap field_map(const MieConfig& cfg, Plane plane, double extent, int resolution) {
    if (resolution < 16) throw ConfigError("field map resolution must be at least 16");
    if (!(extent > 0.0) || !std::isfinite(extent)) throw ConfigError("extent must be positive");
    const MieSolution sol(cfg);

    FieldMap map;
    map.plane = plane;
    map.u = Eigen::VectorXd::LinSpaced(resolution, -extent, extent);
    map.v = map.u;
    map.abs_e.resize(resolution, resolution);
    map.abs_h.resize(resolution, resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            try {
                const FieldSample s = field_cartesian(sol, plane_point(plane, map.u(i), map.v(j)));
                map.abs_e(i, j) = s.E.norm();
                map.abs_h(i, j) = s.H.norm();
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "field map cell (" << map.u(i) << ", " << map.v(j) << "): " << e.what();
                throw NumericError(msg.str());
            }
        }
    }
    return map;
}

CircleProfile circle_profile(const MieSolution& solution, Plane plane, double radius,
                             int samples) {
    CircleProfile out;
    out.angle.resize(samples);
    out.abs_e.resize(samples);
    out.abs_h.resize(samples);
    for (int k = 0; k < samples; ++k) {
        const double a = kTwoPi * k / samples;
        const FieldSample s = field_cartesian(
            solution, plane_point(plane, radius * std::cos(a), radius * std::sin(a)));
        out.angle(k) = a;
        out.abs_e(k) = s.E.norm();
        out.abs_h(k) = s.H.norm();
    }
    return out;
}

int count_cyclic_peaks(const Eigen::VectorXd& values, double rel_prominence) {
    const Eigen::Index m = values.size();
    if (m < 3) return 0;
    const double range = values.maxCoeff() - values.minCoeff();
    if (!(range > 0.0)) return 0;
    auto at = [&](Eigen::Index k) { return values(((k % m) + m) % m); };

    int peaks = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
        const double v = values(k);
        if (!(v > at(k - 1) && v >= at(k + 1))) continue;
        double left_min = v, right_min = v;
        for (Eigen::Index s = 1; s < m; ++s) {
            const double w = at(k - s);
            if (w > v) break;
            left_min = std::min(left_min, w);
        }
        for (Eigen::Index s = 1; s < m; ++s) {
            const double w = at(k + s);
            if (w > v) break;
            right_min = std::min(right_min, w);
        }
        if (v - std::max(left_min, right_min) > rel_prominence * range) ++peaks;
    }
    return peaks;
}

} // namespace nvgrape::mie
