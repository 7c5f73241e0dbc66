#pragma once

#include <array>

#include "arcrom/common.hpp"
#include "arcrom/geometry.hpp"

namespace arcrom {

/// Frequency and Lame parameters of the background medium.
struct ElasticParams {
  double omega = 10.0;
  double lambda = 2.0;
  double mu = 1.0;

  ElasticParams() = default;
  ElasticParams(double omega, double lambda, double mu);

  /// Compressional and shear wavenumbers.
  double kp() const { return omega / std::sqrt(lambda + 2.0 * mu); }
  double ks() const { return omega / std::sqrt(mu); }
  void check() const;
};

/// Scalar radial factors of G = G1(d) I + G2(d) D.
struct RadialGreen {
  cplx g1, g2;
};

/// Split of the radial factors as G_i = log(d^2) J_i + R_i. Valid for d >= 0.
struct RadialSplit {
  cplx j1, j2, r1, r2;
};

RadialGreen radial_green(const ElasticParams& p, double d);
RadialSplit radial_split(const ElasticParams& p, double d);

/// Elastodynamic fundamental solution G(x, y); throws SingularityError for x == y.
Mat2c green(const ElasticParams& p, const Vec2& x, const Vec2& y);

struct SelfKernelSplit {
  Mat2c j_part;
  Mat2c reg_part;
};

/// J(t,tau) and R(t,tau) = G - log(d^2) J for points of one arc, including the
/// diagonal t == tau. For |t - tau| < 1e-6 the direction matrix uses the
/// tangent at the midpoint.
SelfKernelSplit self_kernel_split(const ElasticParams& p, const Arc& arc, double t, double tau);

double plane_wave_phase(double theta, double kappa, const Vec2& x);
cplx plane_wave(double theta, double kappa, const Vec2& x);

/// e_theta g_{theta,kp}(r(t)): trace of the incident compressional plane wave.
Vec2c dirichlet_data(double theta, const ElasticParams& p, const Arc& arc, double t);
/// Same data with polarization e_pol and propagation direction theta.
Vec2c dirichlet_data(double theta, double pol, const ElasticParams& p, const Arc& arc, double t);

enum class GridKind { cross, self_j, self_reg };
const char* to_string(GridKind k);

/// Kernel values on a tensor grid of nodes: entry(a,b)(i,l) is the (a,b)
/// component at (t_i, tau_l); t belongs to the test arc, tau to the trial arc.
struct KernelGrid {
  GridKind kind = GridKind::cross;
  std::array<MatrixXc, 4> entries;

  int n_c() const { return static_cast<int>(entries[0].rows()); }
  MatrixXc& entry(int a, int b) { return entries[2 * a + b]; }
  const MatrixXc& entry(int a, int b) const { return entries[2 * a + b]; }
  /// Grid of the swapped pair: G(y,x)^T, i.e. entry(a,b) <- entry(b,a)^T.
  KernelGrid swapped() const;
};

/// G(test(t_i), trial(tau_l)). Throws MisuseError if both arcs coincide.
KernelGrid cross_grid(const ElasticParams& p, const Arc& test, const Arc& trial,
                      const Eigen::VectorXd& nodes, int threads = 0);

/// self_j: J(t,tau). self_reg: R + log(Q) J with Q = d^2 / (t - tau)^2
/// (Q = |r'(t)|^2 on the diagonal), so that G = 2 log|t - tau| J + self_reg.
KernelGrid self_grid(const ElasticParams& p, const Arc& arc, const Eigen::VectorXd& nodes,
                     GridKind kind, int threads = 0);

/// One self-grid value at (t, tau), t and tau being nodes of the grid.
Mat2c self_grid_value(const ElasticParams& p, const Arc& arc, double t, double tau, GridKind kind);

/// Both self grids in one pass.
std::pair<KernelGrid, KernelGrid> self_grids(const ElasticParams& p, const Arc& arc,
                                             const Eigen::VectorXd& nodes, int threads = 0);

}  // namespace arcrom
