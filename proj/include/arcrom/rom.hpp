#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "arcrom/hf_solver.hpp"

namespace arcrom {

/// Global geometry parameters plus the perturbation basis shared by all arcs.
struct ArcFamily {
  GlobalGeometry geom;
  BasisPtr basis;
};

/// Second right-hand side of the single-arc snapshot problems.
enum class SecondRhs {
  rotated_polarization,  // e_{theta+pi/2} g_{theta,kp}
  rotated_direction,     // e_theta g_{theta+pi/2,kp}
};
const char* to_string(SecondRhs r);

struct SnapshotOptions {
  int N = 40;
  int n_c = 0;
  int n_log = 0;
  SecondRhs second = SecondRhs::rotated_polarization;
  int threads = 0;
};

struct SnapshotMatrix {
  /// Columns 2i and 2i+1 are the two right-hand sides of sample i.
  MatrixXc columns;
  /// One generalized-arc parameter row (length s+4) per kept sample.
  Eigen::MatrixXd sample_params;
  std::vector<int> rhs_kind;  // 0: theta, 1: second right-hand side
  std::vector<double> residuals;
  std::vector<int> failed;  // Halton indices of skipped samples
  std::vector<std::string> failure_messages;
};

/// Single-arc HF solutions over seeded Halton samples of the generalized arc.
SnapshotMatrix sample_snapshots(const ArcFamily& family, const ElasticParams& params,
                                int n_geo_samples, double theta, std::uint64_t seed,
                                const SnapshotOptions& opts = {});

struct ReducedBasis {
  MatrixXc v;  // 2(N+1) x R, orthonormal columns
  Eigen::VectorXd singular_values;
  double eps_svd = 0.0;

  int R() const { return static_cast<int>(v.cols()); }
  int N() const { return static_cast<int>(v.rows() / 2) - 1; }
};

/// Smallest R with sum_{n<=R} s_n^2 / sum_n s_n^2 > 1 - eps^2, capped at the
/// numerical rank.
int energy_rank(const Eigen::VectorXd& sigma, double eps_svd);
ReducedBasis pod_basis(const MatrixXc& snapshots, double eps_svd);
/// Identity basis of the full coefficient space.
ReducedBasis complete_basis(int N);

/// Flattened kernel entry 2a+b. Entry 1 stands for both off-diagonal entries,
/// which coincide because the kernels are symmetric 2x2 matrices.
inline constexpr int model_entries[3] = {0, 1, 3};

/// L^R = V^H L(.) V: Galerkin transform of kernel grids projected on the basis.
class ReducedMap {
 public:
  explicit ReducedMap(MatrixXc v, int n_log = 0);

  int R() const { return static_cast<int>(v_.cols()); }
  int N() const { return N_; }
  const MatrixXc& basis() const { return v_; }

  /// (N+1) x (N+1) Galerkin block of one scalar grid: matrix_transform for
  /// cross and self_reg, the log-singular assembly of 2 log|t-tau| J for self_j.
  MatrixXc scalar_block(GridKind kind, const MatrixXc& scalar) const;
  /// Reduced block of a complete grid.
  MatrixXc apply(const KernelGrid& grid) const;
  /// Reduced block of a scalar grid placed at `entry` (entry 1 fills both
  /// off-diagonal slots). `swapped` gives the block of the pair with test and
  /// trial roles exchanged.
  MatrixXc apply_entry(GridKind kind, int entry, const MatrixXc& scalar,
                       bool swapped = false) const;
  /// Projection of an already transformed scalar block, as in apply_entry.
  MatrixXc project(int entry, const MatrixXc& block, bool swapped = false) const;

 private:
  MatrixXc v_;
  int N_;
  int n_log_;
};

struct EimOptions {
  double eps = 1e-3;
  int q_max = 400;
  int stagnation_window = 5;
  /// Candidate residuals are kept in memory up to this size; larger sets are
  /// re-evaluated chunk by chunk in every iteration.
  double memory_budget_mb = 2048.0;
  int threads = 0;
};

/// Greedy selection independent of the reduced basis.
struct EimGreedy {
  GridKind kind = GridKind::cross;
  int entry = 0;
  int n_c = 0;
  std::vector<std::uint32_t> magic;  // flattened indices i + n_c * l
  std::vector<int> selected;         // candidate index of each term
  MatrixXc interp_square;            // (i, j) = basis_j at magic_i, unit lower triangular
  MatrixXc basis;                    // n_c^2 x q
  /// trajectory[q] = largest relative candidate error with q terms.
  std::vector<double> trajectory;
  bool stagnated = false;
  bool q_max_reached = false;

  int q() const { return static_cast<int>(magic.size()); }
  /// Length of the prefix whose error is below eps (q() if never reached).
  int terms_for(double eps) const;
};

using CandidateGrid = std::function<KernelGrid(int)>;

/// Greedy EIM over n_candidates kernel grids, one run per entry.
std::vector<EimGreedy> eim_greedy(GridKind kind, const std::vector<int>& entries,
                                  int n_candidates, int n_c, const CandidateGrid& candidate,
                                  const EimOptions& opts);

struct EimModel {
  GridKind kind = GridKind::cross;
  int entry = 0;
  int n_c = 0;
  double eps_eim = 0.0;
  std::vector<std::uint32_t> magic;
  std::vector<int> selected;
  MatrixXc interp_square;
  /// Column i holds L^R of basis function i, flattened R x R.
  MatrixXc reduced;
  /// Same for the swapped pair (cross kind only).
  MatrixXc reduced_swapped;
  std::vector<double> trajectory;
  bool stagnated = false;
  bool q_max_reached = false;

  int q() const { return static_cast<int>(magic.size()); }
  int R() const;
  VectorXc coefficients(const VectorXc& magic_values) const;
  MatrixXc combine(const VectorXc& coeffs, bool swapped = false) const;
};

/// Prefix of the greedy run reaching eps_eim, with its reduced matrices.
EimModel eim_reduce(const EimGreedy& greedy, const ReducedMap& map, double eps_eim);
EimModel eim_offline(GridKind kind, int entry, int n_candidates, const CandidateGrid& candidate,
                     const ReducedMap& map, const EimOptions& opts);

/// Kernel entry of `model` at its magic points: cross kind for the pair
/// (test, trial), self kinds for `test` alone (trial ignored).
VectorXc magic_values(const EimModel& model, const ElasticParams& p, const Arc& test,
                      const Arc* trial = nullptr);
MatrixXc eim_online(const EimModel& model, const VectorXc& magic_values, bool swapped = false);

/// Cross candidates are lifted pair parameters, self candidates single-arc
/// parameters, both drawn from seeded Halton sequences.
Eigen::MatrixXd cross_candidates(const GlobalGeometry& geom, int count, std::uint64_t seed);
Eigen::MatrixXd self_candidates(const GlobalGeometry& geom, int count, std::uint64_t seed);

struct OfflineModel {
  ReducedBasis basis;
  std::vector<EimModel> cross, self_j, self_reg;  // one per model entry
  int N = 0;
  int n_c = 0;
  int n_log = 0;
  double eps_eim = 0.0;

  /// Mean number of terms with weights (M^2-M)/M^2 for cross and M/M^2 for
  /// self models; entry 1 counts twice.
  double mean_q(int M) const;
  /// Rounds all stored arrays to the container precision.
  void quantize();
};

struct OfflineSettings {
  int N = 40;
  int n_c = 0;
  int n_log = 0;
  double eps_svd = 1e-6;
  double eps_eim = 1e-3;
  int n_geo_samples = 200;
  int cross_candidates = 4000;
  int self_candidates = 2000;
  int q_max = 400;
  std::uint64_t snapshot_seed = 1;
  std::uint64_t candidate_seed = 2;
  double theta0 = 0.0;
  SecondRhs second_rhs = SecondRhs::rotated_polarization;
  double memory_budget_mb = 2048.0;
  int threads = 0;

  int nodes() const;
  int log_terms() const;
};

/// Basis-independent offline products, reusable across tolerances.
struct OfflineData {
  SnapshotMatrix snapshots;
  std::vector<EimGreedy> cross, self_j, self_reg;
  double ms_snapshots = 0.0;
  double ms_eim = 0.0;
};

OfflineData run_offline(const ArcFamily& family, const ElasticParams& params,
                        const OfflineSettings& settings);
OfflineModel build_model(const OfflineData& data, double eps_svd, double eps_eim,
                         const OfflineSettings& settings);

struct ReducedSystem {
  int M = 0;
  int R = 0;
  MatrixXc matrix;
  VectorXc rhs;
  int extrapolated = 0;  // blocks evaluated outside the training box

  auto block(int k, int j) { return matrix.block(k * R, j * R, R, R); }
  auto block(int k, int j) const { return matrix.block(k * R, j * R, R, R); }
};

struct ReducedAssemblyOptions {
  /// Project exactly assembled HF blocks instead of using the interpolants.
  bool exact = false;
  int threads = 0;
};

ReducedSystem assemble_reduced(const MultiArcConfig& cfg, const OfflineModel& model,
                               const GlobalGeometry& geom, const ReducedAssemblyOptions& opts = {});

struct RbSolution {
  std::vector<VectorXc> coeffs;  // R per arc
  DensitySet density;            // lifted, v a
  int iterations = 0;
  bool lu_fallback = false;
  double rel_residual = 0.0;
};

RbSolution rb_solve(const ReducedSystem& sys, const ReducedBasis& basis,
                    const GmresOptions& gmres = {});

/// sum_k ||sum_j A_kj u_j - g_k||^2 / ||g_k||^2, streaming over the blocks of
/// the upper triangle.
double aposteriori_residual(const MultiArcConfig& cfg, const DensitySet& density);
double aposteriori_residual(const MultiArcConfig& cfg, const ReducedBasis& basis,
                            const std::vector<VectorXc>& coeffs);

/// FNV-1a hash of the family, physics and discretization description.
std::uint64_t family_hash(const ArcFamily& family, const ElasticParams& params, double theta0,
                          int N, int n_c);

}  // namespace arcrom
