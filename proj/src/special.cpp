#include "arcrom/special.hpp"

#include <cmath>
#include <string>

namespace arcrom::special {
namespace {

constexpr double euler_gamma = 0.57721566490153286060651209;

BesselSet power_series(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  // J0, and the harmonic-weighted tail of Y0
  double j0 = 0.0, y0_tail = 0.0;
  {
    double term = 1.0;  // (-q)^m / (m!)^2
    double harmonic = 0.0;
    for (int m = 0; m < 200; ++m) {
      if (m > 0) {
        term *= -q / (double(m) * double(m));
        harmonic += 1.0 / m;
      }
      j0 += term;
      y0_tail -= harmonic * term;
      if (m > q && std::abs(term) < 1e-18 * std::max(1.0, std::abs(j0))) break;
    }
  }
  // J1, and the digamma-weighted tail of Y1
  double j1 = 0.0, y1_tail = 0.0;
  {
    double term = 0.5 * x;  // (-1)^m (x/2)^{2m+1} / (m!(m+1)!)
    double h_m = 0.0, h_m1 = 1.0;
    for (int m = 0; m < 200; ++m) {
      if (m > 0) {
        term *= -q / (double(m) * double(m + 1));
        h_m += 1.0 / m;
        h_m1 += 1.0 / (m + 1);
      }
      j1 += term;
      y1_tail += (h_m + h_m1 - 2.0 * euler_gamma) * term;
      if (m > q && std::abs(term) < 1e-18 * std::max(1e-300, std::abs(j1))) break;
    }
  }
  const double y0 = (2.0 / pi) * ((log_half + euler_gamma) * j0 + y0_tail);
  const double y1 = -2.0 / (pi * x) + (2.0 / pi) * log_half * j1 - y1_tail / pi;
  return {j0, j1, y0, y1};
}

BesselSet miller_neumann(double x) {
  // Backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
  // J0 + 2 sum J_{2k} = 1.
  int start = static_cast<int>(1.5 * x + 40.0);
  if (start % 2) ++start;
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-30;
  for (int n = start; n >= 1; --n) {
    j[n - 1] = (2.0 * n / x) * j[n] - j[n + 1];
    if (std::abs(j[n - 1]) > 1e250) {
      for (int k = n - 1; k <= start + 1; ++k) j[k] *= 1e-250;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
  for (auto& v : j) v /= norm;

  const double lg = std::log(0.5 * x) + euler_gamma;
  double s0 = 0.0, s1 = 0.0;
  for (int k = 1; 2 * k + 1 <= start + 1; ++k) {
    const double sign = (k % 2) ? -1.0 : 1.0;
    s0 += sign * j[2 * k] / k;
    s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  const double y0 = (2.0 / pi) * (lg * j[0] - 2.0 * s0);
  const double y1 = (2.0 / pi) * (lg * j[1] - j[0] / x + s1);
  return {j[0], j[1], y0, y1};
}

// Hankel's expansion: P and Q series for order nu, summed until the terms
// stop decreasing or fall below round-off.
void asymptotic_pq(int nu, double x, double& p, double& q) {
  const double mu = 4.0 * nu * nu;
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  double last = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    // k odd -> Q, k even -> P, with alternating signs every two terms
    const int r = k % 4;
    if (r == 1) q += term;
    else if (r == 2) p -= term;
    else if (r == 3) q -= term;
    else p += term;
    if (mag < 1e-17) break;
  }
}

BesselSet asymptotic(double x) {
  const double c = std::cos(x), s = std::sin(x);
  const double amp = std::sqrt(2.0 / (pi * x));
  const double r2 = std::numbers::sqrt2 / 2.0;
  double p0, q0, p1, q1;
  asymptotic_pq(0, x, p0, q0);
  asymptotic_pq(1, x, p1, q1);
  // chi0 = x - pi/4, chi1 = x - 3pi/4
  const double cos0 = r2 * (c + s), sin0 = r2 * (s - c);
  const double cos1 = r2 * (s - c), sin1 = -r2 * (s + c);
  return {amp * (p0 * cos0 - q0 * sin0), amp * (p1 * cos1 - q1 * sin1),
          amp * (p0 * sin0 + q0 * cos0), amp * (p1 * sin1 + q1 * cos1)};
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(name) + ": argument must be positive and finite, got " +
                      std::to_string(x));
}

}  // namespace

BesselSet bessel_all(double x) {
  require_positive(x, "bessel_all");
  if (x < series_limit) return power_series(x);
  if (x < asymptotic_limit) return miller_neumann(x);
  return asymptotic(x);
}

double bessel_j0(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("bessel_j0: negative argument");
  if (x == 0.0) return 1.0;
  return bessel_all(x).j0;
}

double bessel_j1(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("bessel_j1: negative argument");
  if (x == 0.0) return 0.0;
  return bessel_all(x).j1;
}

double bessel_y0(double x) {
  require_positive(x, "bessel_y0");
  return bessel_all(x).y0;
}

double bessel_y1(double x) {
  require_positive(x, "bessel_y1");
  return bessel_all(x).y1;
}

cplx hankel1_0(double x) {
  require_positive(x, "hankel1_0");
  const auto b = bessel_all(x);
  return {b.j0, b.y0};
}

cplx hankel1_1(double x) {
  require_positive(x, "hankel1_1");
  const auto b = bessel_all(x);
  return {b.j1, b.y1};
}

}  // namespace arcrom::special
