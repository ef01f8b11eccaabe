#pragma once

namespace nvgrape::mie {

// Ramanujan's second approximation to the perimeter of an ellipse with
// semi-axes a >= b > 0 (b == 0 is accepted as the degenerate segment).
double ellipse_perimeter(double a, double b);

// Semi-minor axis b in (0, a] such that ellipse_perimeter(a, b) equals
// alpha * c / frequency, found by bisection to 1e-9 m. Throws NumericError
// when the target perimeter lies outside [C(a, 0+), C(a, a)].
double size_ellipsoid(double a, double alpha, double frequency, double tolerance = 1e-9);

} // namespace nvgrape::mie
