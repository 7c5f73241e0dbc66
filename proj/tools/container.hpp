#pragma once

#include <cstdint>
#include <string>

#include "arcrom/rom.hpp"

namespace arcrom::cli {

/// Settings recorded next to an offline model.
struct ModelMeta {
  std::uint64_t family_hash = 0;
  double eps_svd = 0.0;
  double eps_eim = 0.0;
  std::uint64_t snapshot_seed = 0;
  std::uint64_t candidate_seed = 0;
  int n_geo_samples = 0;
  int cross_candidates = 0;
  int self_candidates = 0;
  int q_max = 0;
  std::string second_rhs;
};

/// Binary layout (little-endian): "ARCROM1\0"; u32 N, n_c, n_log; f64 eps_svd,
/// eps_eim; basis as u64 rows, cols and complex64 column-major; u64 count and
/// f64 singular values; u32 model count, then per model u8 kind, u8 entry,
/// u8 flags, u32 q, u32 R, u32 magic[q], i32 selected[q], u64 + f64 trajectory,
/// complex64 interp_square (q x q), reduced (R^2 x q) and, for cross models,
/// reduced_swapped.
///
/// Matrices are stored in single precision; call OfflineModel::quantize()
/// before writing to make a reload bitwise identical to the model in memory.
void write_model(const std::string& path, const OfflineModel& model);
OfflineModel read_model(const std::string& path);

/// JSON sidecar at path + ".json".
void write_meta(const std::string& path, const OfflineModel& model, const ModelMeta& meta);
ModelMeta read_meta(const std::string& path);

}  // namespace arcrom::cli
