#include "arcrom/linalg.hpp"

#include <cmath>

namespace arcrom {

GmresResult gmres(const LinearOp& apply, const LinearOp& precondition, const VectorXc& b,
                  const GmresOptions& opts, const VectorXc& x0) {
  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = x0.size() == n ? x0 : VectorXc::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  const int m = std::max(1, std::min<int>(opts.restart, static_cast<int>(n)));
  MatrixXc V(n, m + 1);
  MatrixXc H = MatrixXc::Zero(m + 1, m);
  VectorXc cs(m), sn(m), g(m + 1);
  VectorXc r(n), w(n), z(n);

  auto residual = [&]() {
    apply(res.x, w);
    r = b - w;
    return r.norm();
  };

  double rnorm = residual();
  res.rel_residual = rnorm / bnorm;
  while (res.iterations < opts.max_iter && res.rel_residual > opts.tol) {
    V.col(0) = r / rnorm;
    g.setZero();
    g[0] = rnorm;
    H.setZero();
    int k = 0;
    for (; k < m && res.iterations < opts.max_iter; ++k) {
      ++res.iterations;
      precondition(V.col(k), z);
      apply(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V.col(i).dot(w);
        w -= H(i, k) * V.col(i);
      }
      const double h = w.norm();
      H(k + 1, k) = h;
      if (h > 0.0) V.col(k + 1) = w / h;
      for (int i = 0; i < k; ++i) {
        const cplx t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double a = std::abs(H(k, k));
      const double denom = std::hypot(a, h);
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = H(k, k) / denom;
        sn[k] = h / denom;
      }
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      if (std::abs(g[k + 1]) / bnorm <= opts.tol || h == 0.0) {
        ++k;
        break;
      }
    }
    const VectorXc y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    precondition(V.leftCols(k) * y, z);
    res.x += z;
    rnorm = residual();
    const double prev = res.rel_residual;
    res.rel_residual = rnorm / bnorm;
    if (res.rel_residual >= prev) break;  // stagnation
  }
  res.converged = res.rel_residual <= opts.tol;
  return res;
}

BlockJacobi::BlockJacobi(const std::vector<MatrixXc>& blocks) {
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw DimensionError("BlockJacobi: blocks must be square");
    offset_.push_back(total_);
    total_ += static_cast<int>(b.rows());
    lu_.emplace_back(b);
  }
}

void BlockJacobi::apply(const VectorXc& in, VectorXc& out) const {
  if (in.size() != total_) throw DimensionError("BlockJacobi: vector size mismatch");
  out.resize(total_);
  for (std::size_t i = 0; i < lu_.size(); ++i) {
    const int n = static_cast<int>(lu_[i].rows());
    out.segment(offset_[i], n) = lu_[i].solve(in.segment(offset_[i], n));
  }
}

}  // namespace arcrom
