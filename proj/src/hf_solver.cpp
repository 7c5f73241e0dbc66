#include "arcrom/hf_solver.hpp"

#include <chrono>
#include <string>

#include "arcrom/parallel.hpp"
#include "arcrom/spectral.hpp"

namespace arcrom {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

int HfOptions::nodes() const { return n_c > 0 ? n_c : spectral::default_node_count(N); }
int HfOptions::log_terms() const { return n_log > 0 ? n_log : spectral::default_log_terms(N); }

VectorXc DensitySet::stacked() const {
  Eigen::Index total = 0;
  for (const auto& a : arcs) total += a.size();
  VectorXc x(total);
  Eigen::Index off = 0;
  for (const auto& a : arcs) {
    x.segment(off, a.size()) = a;
    off += a.size();
  }
  return x;
}

DensitySet DensitySet::unstack(const VectorXc& x, int M) {
  if (M <= 0 || x.size() % M) throw DimensionError("DensitySet::unstack: size not divisible");
  const Eigen::Index n = x.size() / M;
  DensitySet d;
  for (int k = 0; k < M; ++k) d.arcs.push_back(x.segment(k * n, n));
  return d;
}

MatrixXc assemble_cross_block(const ElasticParams& p, const Arc& test, const Arc& trial, int N,
                              int n_c, int threads) {
  const auto grid = spectral::ChebGrid::get(n_c);
  return spectral::matrix_transform(cross_grid(p, test, trial, grid->nodes(), threads), N);
}

MatrixXc assemble_self_block(const ElasticParams& p, const Arc& arc, int N, int n_c, int n_log,
                             int threads) {
  const auto grid = spectral::ChebGrid::get(n_c);
  const auto [gj, gr] = self_grids(p, arc, grid->nodes(), threads);
  return spectral::matrix_transform(gr, N) + spectral::singular_block(gj, N, n_log);
}

VectorXc assemble_rhs(const ElasticParams& p, const Arc& arc, int N, int n_c, double theta,
                      double pol) {
  const auto grid = spectral::ChebGrid::get(n_c);
  VectorXc f1(n_c), f2(n_c);
  for (int j = 0; j < n_c; ++j) {
    const Vec2c g = dirichlet_data(theta, pol, p, arc, grid->nodes()[j]);
    f1[j] = g[0];
    f2[j] = g[1];
  }
  VectorXc out(2 * (N + 1));
  out << spectral::vector_transform(f1, N), spectral::vector_transform(f2, N);
  return out;
}

MatrixXc assemble_block(const MultiArcConfig& cfg, int k, int j) {
  if (k < 0 || j < 0 || k >= cfg.M() || j >= cfg.M())
    throw DimensionError("assemble_block: arc index out of range");
  const auto& o = cfg.options;
  if (k == j) return assemble_self_block(cfg.params, cfg.arcs[k], o.N, o.nodes(), o.log_terms(), o.threads);
  return assemble_cross_block(cfg.params, cfg.arcs[k], cfg.arcs[j], o.N, o.nodes(), o.threads);
}

VectorXc assemble_rhs(const MultiArcConfig& cfg, int k) {
  const auto& o = cfg.options;
  return assemble_rhs(cfg.params, cfg.arcs.at(k), o.N, o.nodes(), cfg.theta0, cfg.theta0);
}

int resolve_node_count(const MultiArcConfig& cfg) {
  const auto& o = cfg.options;
  int n_c = o.nodes();
  if (!o.adaptive_nodes || cfg.arcs.empty()) return n_c;
  MatrixXc prev = assemble_self_block(cfg.params, cfg.arcs[0], o.N, n_c, o.log_terms(), o.threads);
  for (int round = 0; round < 4; ++round) {
    const int next = 2 * n_c - 1;
    MatrixXc cur = assemble_self_block(cfg.params, cfg.arcs[0], o.N, next, o.log_terms(), o.threads);
    const double change = (cur - prev).norm() / cur.norm();
    if (change < 1e-11) return n_c;
    n_c = next;
    prev = std::move(cur);
  }
  return n_c;
}

BlockSystem assemble_system(const MultiArcConfig& cfg) {
  if (cfg.M() < 1) throw DimensionError("assemble_system: no arcs");
  MultiArcConfig local = cfg;
  local.options.n_c = resolve_node_count(cfg);
  local.options.threads = 1;
  BlockSystem sys;
  sys.M = cfg.M();
  sys.n = cfg.block_size();
  sys.matrix.resize(sys.M * sys.n, sys.M * sys.n);
  sys.rhs.resize(sys.M * sys.n);

  std::vector<std::pair<int, int>> tasks;
  for (int k = 0; k < sys.M; ++k)
    for (int j = k; j < sys.M; ++j) tasks.emplace_back(k, j);
  parallel_for(
      static_cast<int>(tasks.size()),
      [&](int t) {
        const auto [k, j] = tasks[t];
        MatrixXc b = assemble_block(local, k, j);
        if (k != j) sys.block(j, k) = b.transpose();
        sys.block(k, j) = std::move(b);
      },
      cfg.options.threads);
  for (int k = 0; k < sys.M; ++k) sys.rhs.segment(k * sys.n, sys.n) = assemble_rhs(local, k);
  return sys;
}

HfSolution solve_system(const BlockSystem& sys, const HfOptions& opts) {
  HfSolution out;
  out.report.M = sys.M;
  out.report.N = sys.n / 2 - 1;
  const auto t0 = Clock::now();
  VectorXc x;
  if (opts.solver == LinearSolver::lu) {
    Eigen::PartialPivLU<MatrixXc> lu(sys.matrix);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15))
      throw SolverError("solve_hf: system is numerically singular (rcond=" +
                        std::to_string(rcond) + ")");
    out.report.cond = 1.0 / rcond;
    x = lu.solve(sys.rhs);
  } else {
    std::vector<MatrixXc> diag;
    for (int k = 0; k < sys.M; ++k) diag.push_back(sys.block(k, k));
    BlockJacobi pre(diag);
    auto res = gmres([&](const VectorXc& in, VectorXc& o) { o.noalias() = sys.matrix * in; },
                     [&](const VectorXc& in, VectorXc& o) { pre.apply(in, o); }, sys.rhs,
                     opts.gmres);
    out.report.iterations = res.iterations;
    if (!res.converged)
      throw SolverError("solve_hf: GMRES did not converge (relative residual " +
                        std::to_string(res.rel_residual) + ")");
    x = std::move(res.x);
  }
  out.report.wall_ms_solve = ms_since(t0);
  const double bn = sys.rhs.norm();
  out.report.residual = bn > 0 ? (sys.matrix * x - sys.rhs).norm() / bn : (sys.matrix * x).norm();
  out.density = DensitySet::unstack(x, sys.M);
  return out;
}

HfSolution solve_hf(const MultiArcConfig& cfg) {
  const auto t0 = Clock::now();
  const BlockSystem sys = assemble_system(cfg);
  const double assembly = ms_since(t0);
  HfSolution out = solve_system(sys, cfg.options);
  out.report.wall_ms_assembly = assembly;
  return out;
}

double t_norm_error(const DensitySet& a, const DensitySet& b, double s) {
  if (a.arcs.size() != b.arcs.size()) throw DimensionError("t_norm_error: arc counts differ");
  double total = 0.0;
  for (std::size_t k = 0; k < a.arcs.size(); ++k) {
    const VectorXc& u = a.arcs[k];
    const VectorXc& v = b.arcs[k];
    const Eigen::Index nu = u.size() / 2, nv = v.size() / 2;
    const Eigen::Index n = std::max(nu, nv);
    for (int p = 0; p < 2; ++p)
      for (Eigen::Index i = 0; i < n; ++i) {
        const cplx x = i < nu ? u[p * nu + i] : cplx(0.0);
        const cplx y = i < nv ? v[p * nv + i] : cplx(0.0);
        total += std::pow(1.0 + double(i) * double(i), s) * std::norm(x - y);
      }
  }
  return std::sqrt(total);
}

double t_norm(const DensitySet& a, double s) {
  DensitySet zero;
  zero.arcs.assign(a.arcs.size(), VectorXc::Zero(2));
  return t_norm_error(a, zero, s);
}

std::vector<Vec2c> eval_scattered_field(const MultiArcConfig& cfg, const DensitySet& density,
                                        const std::vector<Vec2>& points) {
  if (static_cast<int>(density.arcs.size()) != cfg.M())
    throw DimensionError("eval_scattered_field: density does not match the arcs");
  std::vector<Vec2c> out(points.size(), Vec2c::Zero());
  parallel_for(
      static_cast<int>(points.size()),
      [&](int i) {
        for (int k = 0; k < cfg.M(); ++k)
          out[i] += spectral::far_field_quadrature(density.arcs[k], cfg.arcs[k], cfg.params, points[i]);
      },
      cfg.options.threads);
  return out;
}

}  // namespace arcrom
