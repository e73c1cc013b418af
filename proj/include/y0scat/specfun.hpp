#pragma once

#include <complex>

namespace y0scat {

// Cylindrical Bessel functions of integer order and real argument.
// Any integer order is accepted; negative orders follow
// Z_{-n}(x) = (-1)^n Z_n(x).

// J_n(x), x >= 0.
double bessel_j(int n, double x);

// Y_n(x), x > 0. Throws std::domain_error for x <= 0. Returns -inf when the
// true value is below the double range (tiny x, large n).
double bessel_y(int n, double x);

// H_n^(2)(x) = J_n(x) - j Y_n(x), x > 0.
std::complex<double> hankel2(int n, double x);

}  // namespace y0scat
