#include "arcrom/spectral.hpp"

#include <map>
#include <mutex>
#include <string>

namespace arcrom::spectral {
namespace {

// left * k * left^T with a real left factor.
MatrixXc sandwich(const Eigen::MatrixXd& left, const MatrixXc& k) {
  MatrixXc out(left.rows(), left.rows());
  out.real() = left * k.real() * left.transpose();
  out.imag() = left * k.imag() * left.transpose();
  return out;
}

void require_resolution(int n_c, int N) {
  if (n_c < N + 1)
    throw ResolutionError(std::to_string(n_c) + " nodes cannot resolve order " +
                          std::to_string(N));
}

}  // namespace

double distance_to_arc(const Arc& arc, const Vec2& x) {
  const int n = 256;
  int best = 0;
  double best_d = 1e300;
  for (int i = 0; i <= n; ++i) {
    const double d = (arc(-1.0 + 2.0 * i / n) - x).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  // golden-section refinement around the best sample
  double a = -1.0 + 2.0 * std::max(best - 1, 0) / n, b = -1.0 + 2.0 * std::min(best + 1, n) / n;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if ((arc(c) - x).norm() < (arc(d) - x).norm())
      b = d;
    else
      a = c;
  }
  return std::min(best_d, (arc(0.5 * (a + b)) - x).norm());
}

Eigen::VectorXd cheb_nodes(int n_c) {
  if (n_c < 2) throw DomainError("cheb_nodes: need at least 2 nodes");
  Eigen::VectorXd x(n_c);
  for (int j = 0; j < n_c; ++j) x[j] = std::cos(pi * (n_c - 1 - j) / double(n_c - 1));
  // exact symmetry and zero at the midpoint
  for (int j = 0; j < n_c / 2; ++j) x[n_c - 1 - j] = -x[j];
  if (n_c % 2) x[n_c / 2] = 0.0;
  return x;
}

ChebGrid::ChebGrid(int n_c) : nodes_(cheb_nodes(n_c)), analysis_(n_c, n_c) {
  const int m = n_c - 1;
  for (int n = 0; n < n_c; ++n) {
    for (int j = 0; j < n_c; ++j) {
      const double theta = pi * (m - j) / double(m);
      double v = (2.0 / m) * std::cos(n * theta);
      if (j == 0 || j == m) v *= 0.5;
      if (n == 0 || n == m) v *= 0.5;
      analysis_(n, j) = v;
    }
  }
}

std::shared_ptr<const ChebGrid> ChebGrid::get(int n_c) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ChebGrid>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n_c];
  if (!slot) slot = std::make_shared<const ChebGrid>(n_c);
  return slot;
}

VectorXc vector_transform(const VectorXc& f, int N) {
  const int n_c = static_cast<int>(f.size());
  require_resolution(n_c, N);
  const auto grid = ChebGrid::get(n_c);
  const auto P = grid->analysis().topRows(N + 1);
  VectorXc out(N + 1);
  out.real() = P * f.real();
  out.imag() = P * f.imag();
  for (int l = 0; l <= N; ++l) out[l] *= norm_const(l);
  return out;
}

MatrixXc cheb2d_coeffs(const MatrixXc& grid) {
  if (grid.rows() != grid.cols()) throw DimensionError("cheb2d_coeffs: grid must be square");
  return sandwich(ChebGrid::get(static_cast<int>(grid.rows()))->analysis(), grid);
}

cplx cheb2d_eval(const MatrixXc& coeffs, double t, double tau) {
  Eigen::VectorXd tt(coeffs.rows()), ts(coeffs.cols());
  for (Eigen::Index n = 0; n < tt.size(); ++n) tt[n] = std::cos(n * std::acos(t));
  for (Eigen::Index n = 0; n < ts.size(); ++n) ts[n] = std::cos(n * std::acos(tau));
  return (tt.cast<cplx>().transpose() * coeffs * ts.cast<cplx>())(0, 0);
}

MatrixXc matrix_transform(const MatrixXc& grid, int N) {
  if (grid.rows() != grid.cols()) throw DimensionError("matrix_transform: grid must be square");
  const int n_c = static_cast<int>(grid.rows());
  require_resolution(n_c, N);
  const Eigen::MatrixXd P = ChebGrid::get(n_c)->analysis().topRows(N + 1);
  MatrixXc out = sandwich(P, grid);
  for (int l = 0; l <= N; ++l)
    for (int m = 0; m <= N; ++m) out(l, m) *= norm_const(l) * norm_const(m);
  return out;
}

MatrixXc matrix_transform(const KernelGrid& grid, int N) {
  if (grid.kind == GridKind::self_j)
    throw MisuseError("matrix_transform: self_j grids need singular_assemble");
  const int n = N + 1;
  MatrixXc out(2 * n, 2 * n);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) out.block(p * n, q * n, n, n) = matrix_transform(grid.entry(p, q), N);
  return out;
}

Eigen::VectorXd log_coeffs(int n_log) {
  if (n_log < 0) throw DomainError("log_coeffs: negative truncation");
  Eigen::VectorXd d(n_log + 1);
  d[0] = -pi * std::log(2.0);
  for (int n = 1; n <= n_log; ++n) d[n] = -pi / n;
  return d;
}

MatrixXc singular_assemble(const MatrixXc& j_coeffs, const Eigen::VectorXd& d, int N) {
  if (j_coeffs.rows() != j_coeffs.cols())
    throw DimensionError("singular_assemble: coefficient array must be square");
  const int Q = static_cast<int>(j_coeffs.rows()) - 1;
  if (Q < N) throw DimensionError("singular_assemble: coefficient array smaller than order");
  const int n_max = std::min(static_cast<int>(d.size()) - 1, Q + N);

  // For fixed n, T_a T_n = (T_{a+n} + T_{|a-n|}) / 2 meets T_l for a in
  // {l - n, l + n, n - l}, with multiplicity [a + n == l] + [|a - n| == l].
  struct Tap {
    int a;
    double w;
  };
  MatrixXc out = MatrixXc::Zero(N + 1, N + 1);
  std::vector<std::vector<Tap>> taps(N + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double dn = d[n] / (norm_const(n) * norm_const(n));
    for (int l = 0; l <= N; ++l) {
      auto& tl = taps[l];
      tl.clear();
      for (int a : {l - n, l + n, n - l}) {
        if (a < 0 || a > Q) continue;
        bool seen = false;
        for (const auto& t : tl) seen = seen || t.a == a;
        if (seen) continue;
        const double w = (a + n == l ? 1.0 : 0.0) + (std::abs(a - n) == l ? 1.0 : 0.0);
        if (w != 0.0) tl.push_back({a, w});
      }
    }
    for (int l = 0; l <= N; ++l)
      for (int m = 0; m <= N; ++m) {
        cplx acc = 0.0;
        for (const auto& ta : taps[l])
          for (const auto& tb : taps[m]) acc += ta.w * tb.w * j_coeffs(ta.a, tb.a);
        out(l, m) += dn * acc;
      }
  }
  for (int l = 0; l <= N; ++l)
    for (int m = 0; m <= N; ++m) out(l, m) *= 0.25 * norm_const(l) * norm_const(m);
  return out;
}

MatrixXc singular_block(const KernelGrid& grid, int N, int n_log) {
  if (grid.kind != GridKind::self_j) throw MisuseError("singular_block: needs a self_j grid");
  require_resolution(grid.n_c(), N);
  if (n_log <= 0) n_log = default_log_terms(N);
  const Eigen::VectorXd d = log_coeffs(n_log);
  const int n = N + 1;
  MatrixXc out(2 * n, 2 * n);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      out.block(p * n, q * n, n, n) = singular_assemble(2.0 * cheb2d_coeffs(grid.entry(p, q)), d, N);
  return out;
}

Vec2c far_field_quadrature(const VectorXc& density, const Arc& arc, const KernelFn& kernel,
                           const Vec2& x, int n_quad) {
  if (density.size() % 2) throw DimensionError("far_field_quadrature: odd density length");
  const int n = static_cast<int>(density.size() / 2);
  const int N = n - 1;
  if (n_quad <= 0) n_quad = std::max(4 * N, 64);
  Vec2c out = Vec2c::Zero();
  if (density.isZero(0.0)) return out;
  if (distance_to_arc(arc, x) < 1e-3 * arc.half_length())
    throw SingularityError("far_field_quadrature: observation point too close to the arc");
  for (int i = 1; i <= n_quad; ++i) {
    const double theta = (2 * i - 1) * pi / (2.0 * n_quad);
    const double tau = std::cos(theta);
    const Vec2 y = arc(tau);
    Vec2c u = Vec2c::Zero();
    for (int m = 0; m < n; ++m) {
      const double tm = std::cos(m * theta) / norm_const(m);
      u[0] += density[m] * tm;
      u[1] += density[n + m] * tm;
    }
    out += kernel(x, y) * u;
  }
  return out * (pi / n_quad);
}

Vec2c far_field_quadrature(const VectorXc& density, const Arc& arc, const ElasticParams& p,
                           const Vec2& x, int n_quad) {
  return far_field_quadrature(
      density, arc, [&p](const Vec2& a, const Vec2& b) { return green(p, a, b); }, x, n_quad);
}

}  // namespace arcrom::spectral
