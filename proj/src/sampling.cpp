#include "arcrom/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "arcrom/common.hpp"

namespace arcrom {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

Halton::Halton(int dim, std::uint64_t seed, std::uint64_t skip) : index_(skip) {
  if (dim < 1) throw DimensionError("Halton: dimension must be positive");
  bases_ = first_primes(dim);
  std::mt19937_64 rng(seed);
  for (int b : bases_) {
    std::vector<int> perm(b);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin() + 1, perm.end(), rng);
    perms_.push_back(std::move(perm));
  }
}

Eigen::VectorXd Halton::point(std::uint64_t index) const {
  Eigen::VectorXd x(dim());
  for (int d = 0; d < dim(); ++d) {
    const int b = bases_[d];
    const auto& perm = perms_[d];
    double f = 1.0, r = 0.0;
    for (std::uint64_t i = index; i > 0; i /= b) {
      f /= b;
      r += f * perm[i % b];
    }
    x[d] = r - 0.5;
  }
  return x;
}

Eigen::VectorXd Halton::next() { return point(index_++); }

Eigen::MatrixXd Halton::take(int count) {
  Eigen::MatrixXd m(count, dim());
  for (int i = 0; i < count; ++i) m.row(i) = next().transpose();
  return m;
}

}  // namespace arcrom
