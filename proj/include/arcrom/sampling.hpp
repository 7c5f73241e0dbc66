#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace arcrom {

/// Scrambled Halton sequence in [-1/2, 1/2]^dim.
///
/// Each coordinate uses the radical inverse in the i-th prime base with a
/// seeded digit permutation (0 is kept fixed), so different seeds give
/// different but equally low-discrepancy point sets.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed, std::uint64_t skip = 1);

  int dim() const { return static_cast<int>(bases_.size()); }
  Eigen::VectorXd point(std::uint64_t index) const;
  Eigen::VectorXd next();
  /// count x dim matrix of consecutive points.
  Eigen::MatrixXd take(int count);

 private:
  std::vector<int> bases_;
  std::vector<std::vector<int>> perms_;
  std::uint64_t index_;
};

std::vector<int> first_primes(int count);

}  // namespace arcrom
