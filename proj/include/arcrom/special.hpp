#pragma once

#include "arcrom/common.hpp"

/// Bessel and Hankel functions of orders 0 and 1 for positive real arguments.
///
/// Three evaluation regimes:
///   x < 5        ascending power series,
///   5 <= x < 25  Miller backward recurrence for J with Neumann series for Y,
///   x >= 25      Hankel asymptotic expansion, truncated at the smallest term.
namespace arcrom::special {

inline constexpr double series_limit = 5.0;
inline constexpr double asymptotic_limit = 25.0;

double bessel_j0(double x);
double bessel_j1(double x);
double bessel_y0(double x);
double bessel_y1(double x);

cplx hankel1_0(double x);
cplx hankel1_1(double x);

/// J0, J1, Y0, Y1 at one argument; shares the work between the four values.
struct BesselSet {
  double j0, j1, y0, y1;
};
BesselSet bessel_all(double x);

}  // namespace arcrom::special
