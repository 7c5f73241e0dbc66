#pragma once

#include <functional>
#include <memory>

#include "arcrom/common.hpp"
#include "arcrom/geometry.hpp"
#include "arcrom/kernel.hpp"

/// Chebyshev machinery for densities u = sum_m a_m T~_m / w, w(t) = sqrt(1 - t^2),
/// with normalized polynomials T~_n = T_n / c_n, c_0 = sqrt(pi), c_n = sqrt(pi/2).
/// Internally all analysis uses classical T_n coefficients.
namespace arcrom::spectral {

inline double norm_const(int n) { return n == 0 ? std::sqrt(pi) : std::sqrt(pi / 2.0); }

/// Default number of sampling nodes for order N.
inline int default_node_count(int N) { return 2 * (N + 1) + 16; }
/// Default truncation of the log-kernel series for order N.
inline int default_log_terms(int N) { return 4 * (N + 1); }

/// Chebyshev-Lobatto nodes cos(pi (n_c - 1 - j) / (n_c - 1)), increasing from -1 to 1.
Eigen::VectorXd cheb_nodes(int n_c);

/// Nodes plus the n_c x n_c matrix mapping node values to classical
/// coefficients of the interpolating polynomial. Shared per n_c.
class ChebGrid {
 public:
  static std::shared_ptr<const ChebGrid> get(int n_c);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::MatrixXd& analysis() const { return analysis_; }

  explicit ChebGrid(int n_c);

 private:
  Eigen::VectorXd nodes_;
  Eigen::MatrixXd analysis_;
};

/// Pairings <f, T~_l / w> for l = 0..N from node values of f.
VectorXc vector_transform(const VectorXc& f, int N);

/// Classical tensor coefficients j_{pq} of sum j_{pq} T_p(t) T_q(tau).
MatrixXc cheb2d_coeffs(const MatrixXc& grid);

/// Evaluates sum j_{pq} T_p(t) T_q(tau).
cplx cheb2d_eval(const MatrixXc& coeffs, double t, double tau);

/// Galerkin block <K phi_m, phi_l> (l, m = 0..N) of a smooth scalar kernel from node values.
MatrixXc matrix_transform(const MatrixXc& grid, int N);

/// 2(N+1) x 2(N+1) block of a smooth matrix kernel; component p occupies rows p(N+1)..
MatrixXc matrix_transform(const KernelGrid& grid, int N);

/// Normalized coefficients d_n with log|t - tau| = sum_n d_n T~_n(t) T~_n(tau):
/// d_0 = -pi ln 2, d_n = -pi / n.
Eigen::VectorXd log_coeffs(int n_log);

/// Galerkin block of log|t - tau| J(t, tau) from the classical tensor
/// coefficients of J, using the normalized log coefficients `d`.
MatrixXc singular_assemble(const MatrixXc& j_coeffs, const Eigen::VectorXd& d, int N);

/// Galerkin block of 2 log|t - tau| J(t, tau) for a self_j grid, all four components.
MatrixXc singular_block(const KernelGrid& grid, int N, int n_log = 0);

/// Distance from x to the arc (sampled, then refined by golden section).
double distance_to_arc(const Arc& arc, const Vec2& x);

using KernelFn = std::function<Mat2c(const Vec2&, const Vec2&)>;

/// Single-layer potential at x of the density with coefficients `density`
/// (component p at p(N+1)..), by Gauss-Chebyshev quadrature with
/// max(4N, 64) nodes unless `n_quad` is given.
Vec2c far_field_quadrature(const VectorXc& density, const Arc& arc, const KernelFn& kernel,
                           const Vec2& x, int n_quad = 0);
Vec2c far_field_quadrature(const VectorXc& density, const Arc& arc, const ElasticParams& p,
                           const Vec2& x, int n_quad = 0);

}  // namespace arcrom::spectral
