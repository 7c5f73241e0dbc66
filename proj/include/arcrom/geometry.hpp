#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arcrom/common.hpp"

namespace arcrom {

/// Vector-valued perturbation functions r_n : [-1,1] -> R^2 with decay bounds b_n.
///
/// Functions are either closures (value and optional derivative) or tabulated
/// classical Chebyshev coefficients per component.
class PerturbationBasis {
 public:
  using Fn = std::function<Vec2(double)>;

  /// Trigonometric family: for p in {1,2}, n in 1..s/4, term 2K(p-1)+2n is
  /// c_n cos((n-1)t) e_p and term 2K(p-1)+2n-1 is c_n sin(nt) e_p (1-based,
  /// K = s/4), with c_n = amplitude * n^-decay_exponent.
  static PerturbationBasis trigonometric(int s, double amplitude = 1.0,
                                         double decay_exponent = 2.5);

  /// coeffs[n] holds the classical Chebyshev coefficients (2 x K) of term n.
  /// Decay bounds default to the sum of absolute coefficients.
  static PerturbationBasis chebyshev_table(std::vector<Eigen::MatrixXd> coeffs,
                                           std::vector<double> decay = {});

  /// Closure terms; derivatives may be left empty, in which case
  /// derivative() throws UnsupportedError.
  static PerturbationBasis closures(std::vector<Fn> values, std::vector<Fn> derivatives,
                                    std::vector<double> decay);

  int size() const { return static_cast<int>(decay_.size()); }
  double decay(int n) const { return decay_.at(n); }
  const std::vector<double>& decay_norms() const { return decay_; }
  /// 0-based index from which the decay bounds are expected to be non-increasing.
  int monotone_from() const { return monotone_from_; }
  void set_monotone_from(int n) { monotone_from_ = n; }
  bool differentiable() const;

  Vec2 value(int n, double t) const;
  Vec2 derivative(int n, double t) const;

  /// sum_n y_n r_n(t) and its t-derivative.
  Vec2 combine(const Eigen::Ref<const Eigen::VectorXd>& y, double t) const;
  Vec2 combine_derivative(const Eigen::Ref<const Eigen::VectorXd>& y, double t) const;

  /// Short description used in family hashes.
  const std::string& tag() const { return tag_; }

 private:
  std::vector<Fn> values_;
  std::vector<Fn> derivatives_;
  std::vector<Eigen::MatrixXd> table_;
  std::vector<double> decay_;
  int monotone_from_ = 0;
  std::string tag_;
};

using BasisPtr = std::shared_ptr<const PerturbationBasis>;

struct GlobalGeometry {
  double box_half_width = 10.0;
  double r_min = 0.56, r_max = 0.93;
  double d_min = 5.0, d_max = 21.0;
  int s = 12;

  double rho(double z) const { return (r_max - r_min) * (z + 0.5) + r_min; }
  double phi(double z) const { return pi * (z + 0.5); }
  double dist(double z) const { return (d_max - d_min) * (z + 0.5) + d_min; }
  double rho_inv(double r) const { return (r - r_min) / (r_max - r_min) - 0.5; }
  double phi_inv(double a) const { return a / pi - 0.5; }
  double dist_inv(double d) const { return (d - d_min) / (d_max - d_min) - 0.5; }
};

struct SegmentMeta {
  Vec2 center = Vec2::Zero();
  double half_length = 1.0;
  double orientation = 0.0;
};

/// c + rho (cos phi, sin phi) t + sum_n y_n r_n(t), t in [-1,1].
class Arc {
 public:
  Arc(SegmentMeta segment, Eigen::VectorXd y, BasisPtr basis);
  /// Plain segment with no perturbation terms.
  explicit Arc(SegmentMeta segment);

  const SegmentMeta& segment() const { return seg_; }
  const Vec2& center() const { return seg_.center; }
  double half_length() const { return seg_.half_length; }
  double orientation() const { return seg_.orientation; }
  const Eigen::VectorXd& y() const { return y_; }
  const BasisPtr& basis() const { return basis_; }

  Vec2 operator()(double t) const;
  Vec2 derivative(double t) const;

  /// Same arc moved by offset.
  Arc translated(const Vec2& offset) const;

 private:
  SegmentMeta seg_;
  Eigen::VectorXd y_;
  BasisPtr basis_;
  Vec2 dir_;
};

Mat2 rotation(double theta);
inline Vec2 unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Single arc of the generalized family, y of length s+4:
/// center 2B(y1,y2), half-length rho(y3), orientation phi(y4), perturbation y5...
Arc generalized_arc(const Eigen::Ref<const Eigen::VectorXd>& y, const GlobalGeometry& geom,
                    const BasisPtr& basis);

/// Parameter vector (length s+2) describing an arc up to translation:
/// (rho^-1(rho), phi^-1(phi), y).
Eigen::VectorXd self_param(const Arc& arc, const GlobalGeometry& geom);
Arc self_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
             const BasisPtr& basis);

/// Pair parameter of length 2s+6.
///
/// z = (rho^-1(rho_a), phi^-1(phi_a), y_a, d^-1(|c_b - c_a|), phi^-1(arg(c_b - c_a)),
///      rho^-1(rho_b), phi^-1(phi_b), y_b)
/// where (a, b) = (k, j) when arg(c_j - c_k) lies in [0, pi), and (j, k)
/// otherwise; in the second case `transposed` is set and
/// G(r_k(t), r_j(tau)) = G(h1(z, tau), h2(z, t))^T.
struct LiftedParam {
  Eigen::VectorXd z;
  bool transposed = false;
};

/// With strict = false the distance bounds are not enforced and components of
/// z may leave [-1/2, 1/2].
LiftedParam lift_pair(const Arc& arc_k, const Arc& arc_j, const GlobalGeometry& geom,
                      bool strict = true);

/// First arc of a lifted pair, centered at the origin.
Arc h1_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
           const BasisPtr& basis);
/// Second arc of a lifted pair, centered at d(z_{s+3}) e_{phi(z_{s+4})}.
Arc h2_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
           const BasisPtr& basis);
Vec2 eval_h1(const Eigen::Ref<const Eigen::VectorXd>& z, double t, const GlobalGeometry& geom,
             const BasisPtr& basis);
Vec2 eval_h2(const Eigen::Ref<const Eigen::VectorXd>& z, double t, const GlobalGeometry& geom,
             const BasisPtr& basis);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  bool informational = false;  // reported but not part of the verdict
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok() const;
};

struct ValidationOptions {
  int t_grid = 2048;
  int family_samples = 256;
  std::uint64_t seed = 7;
};

ValidationReport validate_family(const GlobalGeometry& geom, const PerturbationBasis& basis,
                                 const std::vector<SegmentMeta>& segments,
                                 const ValidationOptions& opts = {});

/// Random family member placement: M centers on a jittered, randomly rotated
/// hexagonal lattice inside the box with pairwise distances in [d_min, d_max],
/// half-lengths and orientations uniform, perturbation parameters uniform.
std::vector<Arc> sample_configuration(int M, const GlobalGeometry& geom, const BasisPtr& basis,
                                      std::uint64_t seed);

}  // namespace arcrom
