#pragma once

#include <vector>

#include <Eigen/Core>

#include "nvgrape/mie/mie.hpp"

namespace nvgrape::mie {

using Vector3c = Eigen::Vector3cd;

// Field components in the local spherical basis (r, theta, phi), per unit
// incident amplitude E0 = 1 V/m.
struct FieldSample {
    double r = 0.0, theta = 0.0, phi = 0.0;
    Vector3c E = Vector3c::Zero();
    Vector3c H = Vector3c::Zero();
};

enum class FieldPart {
    Total,      // inside: internal series; outside: incident + scattered
    Scattered,  // outside only; zero inside
};

// Coefficients for all orders 1..n_max, evaluated once and reused for
// every point. Without an explicit n_max the field series run 20 orders
// past the default truncation.
class MieSolution {
public:
    explicit MieSolution(const MieConfig& cfg);

    const MieConfig& config() const { return cfg_; }
    int terms() const { return static_cast<int>(coeffs_.size()); }
    const std::vector<MieCoefficients>& coefficients() const { return coeffs_; }

    FieldSample field(double r, double theta, double phi, FieldPart part = FieldPart::Total) const;

private:
    MieConfig cfg_;
    double omega_;
    std::vector<MieCoefficients> coeffs_;
};

FieldSample field_at_point(const MieConfig& cfg, double r, double theta, double phi);

// Closed-form x-polarised plane wave exp(i k2 z), spherical components.
FieldSample incident_plane_wave(const MieConfig& cfg, double r, double theta, double phi);

// Angular functions pi_n = P_n^1(cos t)/sin t and tau_n = dP_n^1/dt for
// n = 0..n_max (index 0 is zero).
void angular_functions(int n_max, double cos_theta, Eigen::VectorXd& pi, Eigen::VectorXd& tau);

// Axis-aligned plane through the origin; u/v are its in-plane coordinates.
enum class Plane { XY, XZ, YZ };

struct FieldMap {
    Plane plane = Plane::XZ;
    Eigen::VectorXd u, v;     // m
    Eigen::MatrixXd abs_e;    // (i, j) = (u_i, v_j)
    Eigen::MatrixXd abs_h;
};

// Square map over [-extent, extent]^2 with resolution x resolution cells.
FieldMap field_map(const MieConfig& cfg, Plane plane, double extent, int resolution);

// Cartesian point for plane coordinates (u, v).
Eigen::Vector3d plane_point(Plane plane, double u, double v);

// |E| and |H| sampled on a circle of the given radius in the plane,
// starting on the +u axis and going counter-clockwise.
struct CircleProfile {
    Eigen::VectorXd angle, abs_e, abs_h;
};
CircleProfile circle_profile(const MieSolution& solution, Plane plane, double radius,
                             int samples);

// Number of strict local maxima of a periodic sequence whose height above
// the neighbouring minima exceeds rel_prominence * (max - min).
int count_cyclic_peaks(const Eigen::VectorXd& values, double rel_prominence = 0.01);

} // namespace nvgrape::mie
