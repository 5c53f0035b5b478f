#pragma once

#include <array>
#include <complex>

#include "ratetip/system.hpp"

namespace ratetip {

/// Eigenvalues of the frozen Jacobian at the inner equilibrium, sorted by
/// real part, largest first.
std::array<std::complex<double>, 3> equilibrium_eigenvalues(const RosslerParams& p);

/// Roots of x^3 + c2 x^2 + c1 x + c0, sorted by real part descending.
std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0);

/// Real part of the complex-conjugate pair at the inner equilibrium; NaN when
/// all three eigenvalues are real.
double complex_pair_real_part(const RosslerParams& p);

/// Hopf point of the inner equilibrium: a at which the complex pair crosses
/// the imaginary axis, by bisection on [a_lo, a_hi].
double locate_hopf(double b, double c, double a_lo, double a_hi, double re_tol = 1e-10);

}  // namespace ratetip
