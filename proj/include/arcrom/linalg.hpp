#pragma once

#include <functional>
#include <vector>

#include "arcrom/common.hpp"

namespace arcrom {

using LinearOp = std::function<void(const VectorXc& in, VectorXc& out)>;

struct GmresOptions {
  int restart = 50;
  double tol = 1e-10;
  int max_iter = 500;
};

struct GmresResult {
  VectorXc x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES with right preconditioning (A M^-1 y = b, x = M^-1 y), so the
/// monitored residual is the true residual of the original system.
GmresResult gmres(const LinearOp& apply, const LinearOp& precondition, const VectorXc& b,
                  const GmresOptions& opts = {}, const VectorXc& x0 = VectorXc());

/// Inverse of a block-diagonal matrix via LU factorizations of each block.
class BlockJacobi {
 public:
  explicit BlockJacobi(const std::vector<MatrixXc>& blocks);
  void apply(const VectorXc& in, VectorXc& out) const;
  int size() const { return total_; }

 private:
  std::vector<Eigen::PartialPivLU<MatrixXc>> lu_;
  std::vector<int> offset_;
  int total_ = 0;
};

}  // namespace arcrom
