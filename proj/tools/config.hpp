#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arcrom/rom.hpp"

namespace arcrom::cli {

/// Invalid or unreadable configuration; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExplicitArc {
  SegmentMeta segment;
  Eigen::VectorXd y;  // perturbation parameters, length s
};

struct GeometryConfig {
  GlobalGeometry geom;
  double amplitude = 1.0;
  double decay_exponent = 2.5;
  int M = 16;
  std::uint64_t seed = 1;
  /// Fixed arcs; when present they replace sampled configurations.
  std::vector<ExplicitArc> arcs;
};

struct PhysicsConfig {
  ElasticParams params;
  double theta0 = 0.0;
};

struct DiscretizationConfig {
  int N = 40;
  int n_c = 0;
  int n_log = 0;
  bool adaptive_nodes = false;
  LinearSolver solver = LinearSolver::lu;
  /// Overkill order for convergence studies; 0 disables them.
  int reference_N = 0;
  std::vector<int> convergence_N;
};

struct RomConfig {
  OfflineSettings offline;
  std::vector<double> sweep_eps_svd{1e-1, 1e-3, 1e-6};
  std::vector<double> sweep_eps_eim{1e-1, 1e-3};
};

struct RunConfig {
  std::string out = "out";
  std::string container = "model.arcrom";
  int threads = 0;
  int samples = 1;
  std::uint64_t seed = 1;
  bool skip_hf = false;
  int timing_repeats = 3;
};

struct ExperimentConfig {
  GeometryConfig geometry;
  PhysicsConfig physics;
  DiscretizationConfig discretization;
  RomConfig rom;
  RunConfig run;

  ArcFamily family() const;
  HfOptions hf_options() const;
  /// Offline settings with the discretization and thread count applied.
  OfflineSettings offline_settings() const;
  std::uint64_t hash() const;
};

/// Parses JSON text; unknown keys and out-of-range values throw ConfigError
/// with the line of the offending entry.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace arcrom::cli
