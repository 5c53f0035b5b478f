#include "ratetip/frozen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ratetip/error.hpp"

namespace ratetip {

std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0) {
  auto poly = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
  auto dpoly = [&](double x) { return (3.0 * x + 2.0 * c2) * x + c1; };

  // One real root from the depressed cubic, then Newton polish and deflation.
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  double t;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    t = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double phi = std::acos(std::clamp(-q / (2.0 * r * r * r), -1.0, 1.0));
    t = 2.0 * r * std::cos(phi / 3.0);
  }
  double x = t - c2 / 3.0;
  for (int i = 0; i < 8; ++i) {
    const double d = dpoly(x);
    if (d == 0.0) break;
    const double step = poly(x) / d;
    x -= step;
    if (std::fabs(step) <= 1e-16 * std::fmax(1.0, std::fabs(x))) break;
  }
  // x^3 + c2 x^2 + c1 x + c0 = (x - root)(x^2 + b1 x + b0)
  const double b1 = c2 + x;
  const double b0 = std::fabs(x) > 1e-8 ? -c0 / x : c1 + b1 * x;
  const std::complex<double> qd = b1 * b1 - 4.0 * b0;
  const std::complex<double> sq = std::sqrt(qd);
  std::array<std::complex<double>, 3> roots{std::complex<double>(x, 0.0), 0.5 * (-b1 + sq),
                                            0.5 * (-b1 - sq)};
  std::sort(roots.begin(), roots.end(), [](const auto& l, const auto& r) {
    return l.real() != r.real() ? l.real() > r.real() : l.imag() > r.imag();
  });
  return roots;
}

std::array<std::complex<double>, 3> equilibrium_eigenvalues(const RosslerParams& p) {
  const State eq = equilibria(p).inner;
  const Mat3 j = jacobian_frozen(p, eq);
  const double minors = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) +
                        (j[0][0] * j[2][2] - j[0][2] * j[2][0]) +
                        (j[1][1] * j[2][2] - j[1][2] * j[2][1]);
  // det(lambda I - J) = lambda^3 - tr lambda^2 + minors lambda - det
  return cubic_roots(-trace(j), minors, -det(j));
}

double complex_pair_real_part(const RosslerParams& p) {
  const auto ev = equilibrium_eigenvalues(p);
  for (const auto& z : ev)
    if (z.imag() != 0.0) return z.real();
  return std::numeric_limits<double>::quiet_NaN();
}

double locate_hopf(double b, double c, double a_lo, double a_hi, double re_tol) {
  if (!(a_lo < a_hi)) throw Error(ErrorKind::InvalidArgument, "a_range must be increasing");
  auto g = [&](double a) { return complex_pair_real_part({a, b, c}); };
  double g_lo = g(a_lo);
  const double g_hi = g(a_hi);
  if (!std::isfinite(g_lo) || !std::isfinite(g_hi) || (g_lo > 0.0) == (g_hi > 0.0))
    throw Error(ErrorKind::NoBracket, "complex pair does not cross the imaginary axis on range");
  double lo = a_lo, hi = a_hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (!std::isfinite(gm)) throw Error(ErrorKind::NoBracket, "complex pair lost inside bracket");
    if (std::fabs(gm) < re_tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon())
      return mid;
    if ((gm > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace ratetip
