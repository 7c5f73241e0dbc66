#pragma once

#include <vector>

#include "arcrom/common.hpp"
#include "arcrom/geometry.hpp"
#include "arcrom/kernel.hpp"
#include "arcrom/linalg.hpp"

namespace arcrom {

enum class LinearSolver { lu, gmres };

struct HfOptions {
  int N = 40;
  int n_c = 0;    // sampling nodes; 0 selects the default 2(N+1)+16
  int n_log = 0;  // log-series terms; 0 selects 4(N+1)
  /// Double n_c until a self block changes by less than 1e-11 (relative).
  bool adaptive_nodes = false;
  LinearSolver solver = LinearSolver::lu;
  GmresOptions gmres;
  int threads = 0;

  int nodes() const;
  int log_terms() const;
};

struct MultiArcConfig {
  std::vector<Arc> arcs;
  ElasticParams params;
  double theta0 = 0.0;
  HfOptions options;

  int M() const { return static_cast<int>(arcs.size()); }
  /// Unknowns per arc.
  int block_size() const { return 2 * (options.N + 1); }
};

/// Coefficient vectors, one per arc, each [component 1 (N+1), component 2 (N+1)].
struct DensitySet {
  std::vector<VectorXc> arcs;

  int order() const { return arcs.empty() ? -1 : static_cast<int>(arcs[0].size() / 2) - 1; }
  VectorXc stacked() const;
  static DensitySet unstack(const VectorXc& x, int M);
};

struct SolveReport {
  int M = 0;
  int N = 0;
  double wall_ms_assembly = 0.0;
  double wall_ms_solve = 0.0;
  double residual = 0.0;
  double cond = 0.0;  // 1-norm estimate for LU, 0 when not computed
  int iterations = 0;
};

struct HfSolution {
  DensitySet density;
  SolveReport report;
};

/// Galerkin block of the smooth interaction between two distinct arcs.
MatrixXc assemble_cross_block(const ElasticParams& p, const Arc& test, const Arc& trial, int N,
                              int n_c, int threads = 1);
/// Galerkin block of an arc with itself (log-singular part plus regular part).
MatrixXc assemble_self_block(const ElasticParams& p, const Arc& arc, int N, int n_c, int n_log,
                             int threads = 1);
/// Pairings of e_pol g_{theta, kp}(r(t)) with the basis, per component.
VectorXc assemble_rhs(const ElasticParams& p, const Arc& arc, int N, int n_c, double theta,
                      double pol);

MatrixXc assemble_block(const MultiArcConfig& cfg, int k, int j);
VectorXc assemble_rhs(const MultiArcConfig& cfg, int k);

struct BlockSystem {
  int M = 0;
  int n = 0;  // block size
  MatrixXc matrix;
  VectorXc rhs;

  auto block(int k, int j) { return matrix.block(k * n, j * n, n, n); }
  auto block(int k, int j) const { return matrix.block(k * n, j * n, n, n); }
};

BlockSystem assemble_system(const MultiArcConfig& cfg);
HfSolution solve_hf(const MultiArcConfig& cfg);
/// Solves an already assembled system with the configured solver.
HfSolution solve_system(const BlockSystem& sys, const HfOptions& opts);

/// sqrt(sum_arcs sum_n (1+n^2)^s |a_n - b_n|^2) over both components; shorter
/// coefficient vectors are padded with zeros.
double t_norm_error(const DensitySet& a, const DensitySet& b, double s = 0.0);
double t_norm(const DensitySet& a, double s = 0.0);

std::vector<Vec2c> eval_scattered_field(const MultiArcConfig& cfg, const DensitySet& density,
                                        const std::vector<Vec2>& points);

/// Node count selected by the adaptive doubling rule for this configuration.
int resolve_node_count(const MultiArcConfig& cfg);

}  // namespace arcrom
