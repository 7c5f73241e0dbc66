#include <doctest.h>

#include <cmath>
#include <random>

#include "arcrom/hf_solver.hpp"
#include "arcrom/linalg.hpp"
#include "arcrom/sampling.hpp"

using namespace arcrom;

namespace {

GlobalGeometry family() { return GlobalGeometry{10.0, 0.56, 0.93, 5.0, 21.0, 12}; }
BasisPtr family_basis() {
  static BasisPtr b = std::make_shared<PerturbationBasis>(PerturbationBasis::trigonometric(12));
  return b;
}

MultiArcConfig config(std::vector<Arc> arcs, int N, double theta = 0.3) {
  MultiArcConfig cfg;
  cfg.arcs = std::move(arcs);
  cfg.theta0 = theta;
  cfg.options.N = N;
  return cfg;
}

// Member of the family with the largest half-length and all perturbation
// parameters at their upper bound.
Arc extremal_arc() {
  Eigen::VectorXd y = Eigen::VectorXd::Constant(16, 0.5);
  y.head(4) << 0.0, 0.0, 0.5, 0.1;
  return generalized_arc(y, family(), family_basis());
}

}  // namespace

TEST_CASE("straight arc direct solve") {
  auto cfg = config({Arc(SegmentMeta{Vec2(0, 0), 1.0, 0.0})}, 24);
  const auto sol = solve_hf(cfg);
  CHECK(sol.report.residual < 1e-12);
  CHECK(sol.report.M == 1);
  CHECK(sol.report.N == 24);
  CHECK(sol.report.cond > 1.0);
  CHECK(sol.density.arcs.size() == 1);
  CHECK(sol.density.arcs[0].size() == 50);
}

TEST_CASE("block symmetry") {
  const auto arcs = sample_configuration(3, family(), family_basis(), 4);
  auto cfg = config(arcs, 12);
  const auto sys = assemble_system(cfg);
  CHECK((sys.matrix - sys.matrix.transpose()).norm() < 1e-10 * sys.matrix.norm());
  for (int k = 0; k < 3; ++k) {
    const MatrixXc self = assemble_block(cfg, k, k);
    CHECK((self - self.transpose()).norm() < 1e-10 * self.norm());
    for (int j = 0; j < 3; ++j) {
      if (j == k) continue;
      const MatrixXc a = assemble_block(cfg, k, j), b = assemble_block(cfg, j, k);
      CHECK((a - b.transpose()).norm() < 1e-10 * a.norm());
    }
  }
}

TEST_CASE("resolution and far interaction") {
  const Arc arc = extremal_arc();
  const ElasticParams p;
  const int N = 16;
  const int n_c = 2 * (N + 1) + 16;
  const MatrixXc a = assemble_self_block(p, arc, N, n_c, 4 * (N + 1));
  const MatrixXc b = assemble_self_block(p, arc, N, 2 * n_c, 4 * (N + 1));
  CHECK((a - b).norm() < 1e-11 * a.norm());

  Arc near(SegmentMeta{Vec2(0, 0), 0.5, 0.0});
  Arc far(SegmentMeta{Vec2(20, 0), 0.5, 1.0});
  const MatrixXc self = assemble_self_block(p, near, N, n_c, 4 * (N + 1));
  const MatrixXc cross = assemble_cross_block(p, near, far, N, n_c);
  CHECK(cross.norm() < 0.2 * self.norm());

  auto cfg = config({extremal_arc()}, 12);
  cfg.options.adaptive_nodes = true;
  CHECK(resolve_node_count(cfg) >= cfg.options.nodes());
}

TEST_CASE("right-hand side") {
  const ElasticParams p;
  Arc arc(SegmentMeta{Vec2(1, 2), 0.7, 0.4});
  const int N = 10, n = N + 1;
  const VectorXc r = assemble_rhs(p, arc, N, 40, 0.0, 0.0);
  CHECK(r.tail(n).norm() == 0.0);
  CHECK(r.norm() <= std::sqrt(pi) * (1 + 1e-12));
  const VectorXc r2 = assemble_rhs(p, arc, N, 40, 1.1, 1.1);
  CHECK(r2.norm() <= std::sqrt(pi) * (1 + 1e-12));

  const ElasticParams slow(1e-12, 2.0, 1.0);
  const VectorXc r0 = assemble_rhs(slow, arc, N, 40, 0.7, 0.7);
  CHECK(std::abs(r0[0] - std::sqrt(pi) * std::cos(0.7)) < 1e-10);
  CHECK(std::abs(r0[n] - std::sqrt(pi) * std::sin(0.7)) < 1e-10);
  CHECK(r0.segment(1, N).norm() + r0.tail(N).norm() < 1e-10);
}

TEST_CASE("exponential self-convergence") {
  auto cfg = config({extremal_arc()}, 80);
  const auto ref = solve_hf(cfg);
  std::vector<double> err;
  for (int N : {16, 24, 32}) {
    cfg.options.N = N;
    err.push_back(t_norm_error(solve_hf(cfg).density, ref.density) / t_norm(ref.density));
  }
  CHECK(err[0] / err[1] > 2.0);
  CHECK(err[1] / err[2] > 2.0);
}

TEST_CASE("distant arcs decouple") {
  Arc a(SegmentMeta{Vec2(0, 0), 0.8, 0.3});
  const auto single = solve_hf(config({a}, 16));
  auto coupling = [&](double d) {
    Arc b(SegmentMeta{Vec2(d, 0), 0.8, 1.3});
    const auto pair = solve_hf(config({a, b}, 16));
    return (pair.density.arcs[0] - single.density.arcs[0]).norm() / single.density.arcs[0].norm();
  };
  const double c3 = coupling(1e3), c5 = coupling(1e5);
  CHECK(c3 < 1e-2);
  CHECK(c5 < 1e-3);
  // cylindrical spreading of the interaction: d^(-1/2)
  CHECK(c5 / c3 == doctest::Approx(0.1).epsilon(0.2));
}

TEST_CASE("relabeling arcs permutes the solution") {
  const auto arcs = sample_configuration(3, family(), family_basis(), 8);
  const auto s1 = solve_hf(config(arcs, 12));
  const auto s2 = solve_hf(config({arcs[2], arcs[0], arcs[1]}, 12));
  CHECK((s1.density.arcs[2] - s2.density.arcs[0]).norm() < 1e-12 * s1.density.arcs[2].norm());
  CHECK((s1.density.arcs[0] - s2.density.arcs[1]).norm() < 1e-12 * s1.density.arcs[0].norm());
  CHECK((s1.density.arcs[1] - s2.density.arcs[2]).norm() < 1e-12 * s1.density.arcs[1].norm());
}

TEST_CASE("gmres path matches lu") {
  const auto arcs = sample_configuration(4, family(), family_basis(), 2);
  auto cfg = config(arcs, 16);
  const auto lu = solve_hf(cfg);
  cfg.options.solver = LinearSolver::gmres;
  const auto it = solve_hf(cfg);
  CHECK(it.report.iterations > 0);
  CHECK(t_norm_error(lu.density, it.density) < 1e-8 * t_norm(lu.density));
  CHECK(lu.report.residual < 1e-10);
}

TEST_CASE("sobolev-type norms") {
  DensitySet a, b;
  a.arcs = {VectorXc::Random(10), VectorXc::Random(10)};
  b.arcs = {VectorXc::Random(10), VectorXc::Random(14)};
  CHECK(t_norm_error(a, a) == 0.0);
  CHECK(std::abs(t_norm_error(a, DensitySet{{a.arcs[0], b.arcs[0]}}) - (a.arcs[1] - b.arcs[0]).norm()) < 1e-14);
  CHECK(t_norm_error(a, b, -0.5) <= t_norm_error(a, b, 0.0));
  CHECK(t_norm_error(a, b, 1.0) >= t_norm_error(a, b, 0.0));
  // zero padding: missing high modes count in full
  const double padded = t_norm_error(a, b);
  double direct = (a.arcs[0] - b.arcs[0]).squaredNorm();
  for (int p = 0; p < 2; ++p) {
    direct += (a.arcs[1].segment(5 * p, 5) - b.arcs[1].segment(7 * p, 5)).squaredNorm();
    direct += b.arcs[1].segment(7 * p + 5, 2).squaredNorm();
  }
  CHECK(std::abs(padded - std::sqrt(direct)) < 1e-14);
}

TEST_CASE("t0 norm equals the weighted L2 norm of w u") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const int N = 9, n = N + 1;
  VectorXc a(2 * n);
  for (auto& v : a) v = cplx(g(rng), g(rng));
  const int nq = 64;
  double s = 0.0;
  for (int i = 1; i <= nq; ++i) {
    const double th = (2 * i - 1) * pi / (2 * nq);
    for (int p = 0; p < 2; ++p) {
      cplx wu = 0.0;
      for (int m = 0; m < n; ++m) wu += a[p * n + m] * std::cos(m * th) / (m ? std::sqrt(pi / 2) : std::sqrt(pi));
      s += std::norm(wu);
    }
  }
  CHECK(std::abs(std::sqrt(s * pi / nq) - t_norm(DensitySet{{a}})) < 1e-10);
}

TEST_CASE("scattered field") {
  Arc arc(SegmentMeta{Vec2(0, 0), 0.8, 0.3});
  auto cfg = config({arc}, 16);
  const auto sol = solve_hf(cfg);
  DensitySet zero{{VectorXc::Zero(34)}};
  CHECK(eval_scattered_field(cfg, zero, {Vec2(3, 3)})[0].norm() == 0.0);
  DensitySet twice{{2.0 * sol.density.arcs[0]}};
  const auto f1 = eval_scattered_field(cfg, sol.density, {Vec2(3, 3), Vec2(-4, 1)});
  const auto f2 = eval_scattered_field(cfg, twice, {Vec2(3, 3), Vec2(-4, 1)});
  for (int i = 0; i < 2; ++i) CHECK((f2[i] - 2.0 * f1[i]).norm() < 1e-13 * f2[i].norm());
  const Vec2 dir = unit(0.77);
  const auto far = eval_scattered_field(cfg, sol.density, {1e4 * dir, 4e4 * dir});
  // cylindrical spreading: |u| ~ d^(-1/2)
  CHECK(far[1].norm() / far[0].norm() * 2.0 == doctest::Approx(1.0).epsilon(0.2));
}
