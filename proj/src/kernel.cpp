#include "arcrom/kernel.hpp"

#include <cmath>
#include <string>

#include "arcrom/parallel.hpp"
#include "arcrom/special.hpp"

namespace arcrom {
namespace {

constexpr double euler_gamma = 0.57721566490153286060651209;
// Below this value of k_s d the split is summed as power series in d^2.
constexpr double series_threshold = 4.0;

// Per-wavenumber pieces of the split, with q = k^2 d^2 / 4:
//   a0 = J0(kd), a1 = k J1(kd) / d, t = 2 a1 - k^2 a0 (entire in d^2)
// and the regular parts b0, b1, w = 2 b1 - k^2 b0 of H0(kd), k H1(kd) / d and
// their combination once the log(d^2) multiples of a0, a1 and the 1/d^2 pole
// are removed.
struct WaveSplit {
  double a0, a1, t;
  cplx b0, b1, w;
};

WaveSplit wave_split_series(double k, double u) {
  const double q = 0.25 * k * k * u;
  double s_a0 = 0, s_a1 = 0, s_t = 0, s_y0 = 0, s_y1 = 0;
  double p0 = 1.0;  // (-q)^m / (m!)^2
  double h = 0.0;   // H_m
  double scale = 0.0;
  for (int m = 0; m < 200; ++m) {
    if (m > 0) {
      p0 *= -q / (double(m) * double(m));
      h += 1.0 / m;
    }
    const double p1 = p0 / (m + 1);  // (-q)^m / (m! (m+1)!)
    const double h1 = h + 1.0 / (m + 1);
    s_a0 += p0;
    s_a1 += p1;
    s_t += p0 * m / (m + 1.0);
    s_y0 += p0 * (euler_gamma - h);
    s_y1 += p1 * (h + h1 - 2.0 * euler_gamma);
    scale = std::max(scale, std::abs(p0) * (1.0 + h));
    if (m > q && std::abs(p0) * (2.0 + h) < 1e-18 * scale) break;
  }
  const double k2 = k * k;
  const double lk = (2.0 / pi) * std::log(0.5 * k);
  WaveSplit w;
  w.a0 = s_a0;
  w.a1 = 0.5 * k2 * s_a1;
  w.t = -k2 * s_t;
  const double y0 = (2.0 / pi) * s_y0;
  const double y1 = -(k2 / (2.0 * pi)) * s_y1;
  w.b0 = {w.a0, lk * w.a0 + y0};
  w.b1 = {w.a1, lk * w.a1 + y1};
  w.w = {w.t, lk * w.t + 2.0 * y1 - k2 * y0};
  return w;
}

RadialSplit split_from_series(const ElasticParams& p, double u) {
  const WaveSplit s = wave_split_series(p.ks(), u);
  const WaveSplit c = wave_split_series(p.kp(), u);
  const double w2 = p.omega * p.omega;
  RadialSplit r;
  r.j1 = -s.a0 / (4.0 * pi * p.mu) + (s.a1 - c.a1) / (4.0 * pi * w2);
  r.j2 = -(s.t - c.t) / (4.0 * pi * w2);
  r.r1 = (I / (4.0 * p.mu)) * s.b0 - (I / (4.0 * w2)) * (s.b1 - c.b1);
  r.r2 = (I / (4.0 * w2)) * (s.w - c.w);
  return r;
}

RadialGreen green_from_hankel(const ElasticParams& p, double d) {
  const double ks = p.ks(), kp = p.kp();
  const auto bs = special::bessel_all(ks * d);
  const auto bp = special::bessel_all(kp * d);
  const cplx h0s(bs.j0, bs.y0), h1s(bs.j1, bs.y1);
  const cplx h0p(bp.j0, bp.y0), h1p(bp.j1, bp.y1);
  const double w2 = p.omega * p.omega;
  RadialGreen g;
  g.g1 = (I / (4.0 * p.mu)) * h0s - (I / (4.0 * w2 * d)) * (ks * h1s - kp * h1p);
  g.g2 = (I / (4.0 * w2)) *
         ((2.0 * ks * h1s - 2.0 * kp * h1p) / d + kp * kp * h0p - ks * ks * h0s);
  return g;
}

Mat2 direction(const Vec2& v) { return v * v.transpose() / v.squaredNorm(); }

Mat2c combine(cplx a, cplx b, const Mat2& D) {
  Mat2c m = b * D.cast<cplx>();
  m(0, 0) += a;
  m(1, 1) += a;
  return m;
}

}  // namespace

ElasticParams::ElasticParams(double omega_, double lambda_, double mu_)
    : omega(omega_), lambda(lambda_), mu(mu_) {
  check();
}

void ElasticParams::check() const {
  if (!(omega > 0.0) || !(mu > 0.0) || !(lambda + 2.0 * mu > 0.0))
    throw DomainError("elastic parameters need omega > 0, mu > 0, lambda + 2 mu > 0");
}

RadialSplit radial_split(const ElasticParams& p, double d) {
  if (!(d >= 0.0)) throw DomainError("radial_split: negative distance");
  if (p.ks() * d < series_threshold) return split_from_series(p, d * d);
  const RadialGreen g = green_from_hankel(p, d);
  const double ks = p.ks(), kp = p.kp(), w2 = p.omega * p.omega;
  const double a0s = special::bessel_j0(ks * d), a0p = special::bessel_j0(kp * d);
  const double a1s = ks * special::bessel_j1(ks * d) / d;
  const double a1p = kp * special::bessel_j1(kp * d) / d;
  RadialSplit r;
  r.j1 = -a0s / (4.0 * pi * p.mu) + (a1s - a1p) / (4.0 * pi * w2);
  r.j2 = -((2.0 * a1s - ks * ks * a0s) - (2.0 * a1p - kp * kp * a0p)) / (4.0 * pi * w2);
  const double lg = std::log(d * d);
  r.r1 = g.g1 - lg * r.j1;
  r.r2 = g.g2 - lg * r.j2;
  return r;
}

RadialGreen radial_green(const ElasticParams& p, double d) {
  if (!(d > 0.0)) throw SingularityError("radial_green: zero distance");
  if (p.ks() * d < series_threshold) {
    const RadialSplit s = split_from_series(p, d * d);
    const double lg = std::log(d * d);
    return {lg * s.j1 + s.r1, lg * s.j2 + s.r2};
  }
  return green_from_hankel(p, d);
}

Mat2c green(const ElasticParams& p, const Vec2& x, const Vec2& y) {
  const Vec2 v = x - y;
  const double d = v.norm();
  if (d == 0.0) throw SingularityError("green: coincident points");
  const RadialGreen g = radial_green(p, d);
  return combine(g.g1, g.g2, direction(v));
}

SelfKernelSplit self_kernel_split(const ElasticParams& p, const Arc& arc, double t, double tau) {
  const Vec2 v = arc(t) - arc(tau);
  const double d = v.norm();
  Mat2 D;
  if (std::abs(t - tau) < 1e-6 || d == 0.0)
    D = direction(arc.derivative(0.5 * (t + tau)));
  else
    D = direction(v);
  const RadialSplit s = radial_split(p, d);
  return {combine(s.j1, s.j2, D), combine(s.r1, s.r2, D)};
}

double plane_wave_phase(double theta, double kappa, const Vec2& x) {
  return kappa * unit(theta).dot(x);
}

cplx plane_wave(double theta, double kappa, const Vec2& x) {
  return std::polar(1.0, plane_wave_phase(theta, kappa, x));
}

Vec2c dirichlet_data(double theta, const ElasticParams& p, const Arc& arc, double t) {
  return dirichlet_data(theta, theta, p, arc, t);
}

Vec2c dirichlet_data(double theta, double pol, const ElasticParams& p, const Arc& arc, double t) {
  const cplx g = plane_wave(theta, p.kp(), arc(t));
  return unit(pol).cast<cplx>() * g;
}

const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::cross: return "cross";
    case GridKind::self_j: return "self_j";
    case GridKind::self_reg: return "self_reg";
  }
  return "?";
}

KernelGrid KernelGrid::swapped() const {
  KernelGrid out;
  out.kind = kind;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.entry(a, b) = entry(b, a).transpose();
  return out;
}

KernelGrid cross_grid(const ElasticParams& p, const Arc& test, const Arc& trial,
                      const Eigen::VectorXd& nodes, int threads) {
  if (&test == &trial ||
      ((test.center() - trial.center()).norm() == 0.0 &&
       test.half_length() == trial.half_length() && test.orientation() == trial.orientation() &&
       test.y() == trial.y()))
    throw MisuseError("cross_grid: identical arcs; use self_grid");
  const int n = static_cast<int>(nodes.size());
  std::vector<Vec2> xt(n), xs(n);
  for (int i = 0; i < n; ++i) {
    xt[i] = test(nodes[i]);
    xs[i] = trial(nodes[i]);
  }
  KernelGrid g;
  g.kind = GridKind::cross;
  for (auto& e : g.entries) e.resize(n, n);
  parallel_for(
      n,
      [&](int i) {
        for (int l = 0; l < n; ++l) {
          const Mat2c v = green(p, xt[i], xs[l]);
          g.entries[0](i, l) = v(0, 0);
          g.entries[1](i, l) = v(0, 1);
          g.entries[2](i, l) = v(1, 0);
          g.entries[3](i, l) = v(1, 1);
        }
      },
      threads);
  return g;
}

namespace {

SelfKernelSplit self_values(const ElasticParams& p, const Arc& arc, double t, double tau,
                            const Vec2& xt, const Vec2& xtau, const Vec2& dxt) {
  const double dt = tau - t;
  Mat2 D;
  double d, logq;
  if (dt == 0.0) {
    D = direction(dxt);
    d = 0.0;
    logq = std::log(dxt.squaredNorm());
  } else {
    const Vec2 v = xt - xtau;
    d = v.norm();
    if (d == 0.0) throw SingularityError("self_grid: arc self-intersects at the nodes");
    D = std::abs(dt) < 1e-6 ? direction(arc.derivative(0.5 * (t + tau))) : direction(v);
    logq = std::log(v.squaredNorm() / (dt * dt));
  }
  const RadialSplit s = radial_split(p, d);
  return {combine(s.j1, s.j2, D), combine(s.r1 + logq * s.j1, s.r2 + logq * s.j2, D)};
}

}  // namespace

Mat2c self_grid_value(const ElasticParams& p, const Arc& arc, double t, double tau, GridKind kind) {
  if (kind == GridKind::cross) throw MisuseError("self_grid_value: cross kind requested");
  const auto v = self_values(p, arc, t, tau, arc(t), arc(tau), arc.derivative(t));
  return kind == GridKind::self_j ? v.j_part : v.reg_part;
}

std::pair<KernelGrid, KernelGrid> self_grids(const ElasticParams& p, const Arc& arc,
                                             const Eigen::VectorXd& nodes, int threads) {
  const int n = static_cast<int>(nodes.size());
  std::vector<Vec2> x(n), dx(n);
  for (int i = 0; i < n; ++i) {
    x[i] = arc(nodes[i]);
    dx[i] = arc.derivative(nodes[i]);
  }
  KernelGrid gj, gr;
  gj.kind = GridKind::self_j;
  gr.kind = GridKind::self_reg;
  for (auto& e : gj.entries) e.resize(n, n);
  for (auto& e : gr.entries) e.resize(n, n);
  auto store = [](KernelGrid& g, int i, int l, const Mat2c& v) {
    g.entries[0](i, l) = v(0, 0);
    g.entries[1](i, l) = v(0, 1);
    g.entries[2](i, l) = v(1, 0);
    g.entries[3](i, l) = v(1, 1);
    g.entries[0](l, i) = v(0, 0);
    g.entries[1](l, i) = v(1, 0);
    g.entries[2](l, i) = v(0, 1);
    g.entries[3](l, i) = v(1, 1);
  };
  parallel_for(
      n,
      [&](int i) {
        for (int l = i; l < n; ++l) {
          const auto v = self_values(p, arc, nodes[i], nodes[l], x[i], x[l], dx[i]);
          store(gj, i, l, v.j_part);
          store(gr, i, l, v.reg_part);
        }
      },
      threads);
  return {std::move(gj), std::move(gr)};
}

KernelGrid self_grid(const ElasticParams& p, const Arc& arc, const Eigen::VectorXd& nodes,
                     GridKind kind, int threads) {
  if (kind == GridKind::cross) throw MisuseError("self_grid: cross kind requested");
  auto both = self_grids(p, arc, nodes, threads);
  return kind == GridKind::self_j ? std::move(both.first) : std::move(both.second);
}

}  // namespace arcrom
