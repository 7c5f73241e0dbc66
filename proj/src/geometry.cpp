#include "arcrom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "arcrom/sampling.hpp"

namespace arcrom {
namespace {

void check_t(double t) {
  if (!(t >= -1.0 - 1e-14 && t <= 1.0 + 1e-14))
    throw DomainError("arc parameter t=" + std::to_string(t) + " outside [-1,1]");
}

// Clenshaw evaluation of sum_k a_k T_k(t).
double clenshaw(const Eigen::Ref<const Eigen::RowVectorXd>& a, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = a.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (a.size() ? a[0] : 0.0);
}

// Coefficients of the derivative of a Chebyshev series.
Eigen::RowVectorXd cheb_derivative(const Eigen::Ref<const Eigen::RowVectorXd>& a) {
  const Eigen::Index n = a.size();
  if (n <= 1) return Eigen::RowVectorXd::Zero(1);
  Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(n - 1);
  for (Eigen::Index k = n - 2; k >= 0; --k) {
    d[k] = 2.0 * (k + 1) * a[k + 1] + (k + 2 < n - 1 ? d[k + 2] : 0.0);
  }
  d[0] *= 0.5;
  return d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

PerturbationBasis PerturbationBasis::trigonometric(int s, double amplitude, double decay_exponent) {
  if (s <= 0 || s % 4 != 0)
    throw DimensionError("trigonometric perturbation basis needs s divisible by 4, got " +
                         std::to_string(s));
  const int K = s / 4;
  PerturbationBasis b;
  b.values_.resize(s);
  b.derivatives_.resize(s);
  b.decay_.resize(s);
  for (int p = 0; p < 2; ++p) {
    for (int n = 1; n <= K; ++n) {
      const double c = amplitude * std::pow(double(n), -decay_exponent);
      const int cos_idx = 2 * K * p + 2 * n - 1;  // 0-based
      const int sin_idx = cos_idx - 1;
      const Vec2 e = p == 0 ? Vec2(1, 0) : Vec2(0, 1);
      b.values_[cos_idx] = [=](double t) -> Vec2 { return c * std::cos((n - 1) * t) * e; };
      b.derivatives_[cos_idx] = [=](double t) -> Vec2 {
        return -c * (n - 1) * std::sin((n - 1) * t) * e;
      };
      b.values_[sin_idx] = [=](double t) -> Vec2 { return c * std::sin(n * t) * e; };
      b.derivatives_[sin_idx] = [=](double t) -> Vec2 { return c * n * std::cos(n * t) * e; };
      b.decay_[cos_idx] = c;
      b.decay_[sin_idx] = c;
    }
  }
  b.monotone_from_ = 2 * K;
  std::ostringstream tag;
  tag.precision(17);
  tag << "trigonometric:s=" << s << ":amp=" << amplitude << ":exp=" << decay_exponent;
  b.tag_ = tag.str();
  return b;
}

PerturbationBasis PerturbationBasis::chebyshev_table(std::vector<Eigen::MatrixXd> coeffs,
                                                     std::vector<double> decay) {
  PerturbationBasis b;
  for (const auto& c : coeffs)
    if (c.rows() != 2) throw DimensionError("chebyshev_table: coefficient blocks need 2 rows");
  if (decay.empty()) {
    for (const auto& c : coeffs) decay.push_back(std::max(c.row(0).cwiseAbs().sum(),
                                                          c.row(1).cwiseAbs().sum()) * std::sqrt(2.0));
  }
  if (decay.size() != coeffs.size())
    throw DimensionError("chebyshev_table: decay list length mismatch");
  std::ostringstream tag;
  tag.precision(17);
  tag << "chebyshev_table:n=" << coeffs.size();
  for (const auto& c : coeffs)
    for (Eigen::Index i = 0; i < c.size(); ++i) tag << ":" << c(i);
  b.tag_ = tag.str();
  b.table_ = std::move(coeffs);
  b.decay_ = std::move(decay);
  return b;
}

PerturbationBasis PerturbationBasis::closures(std::vector<Fn> values, std::vector<Fn> derivatives,
                                              std::vector<double> decay) {
  if (values.size() != decay.size() || (!derivatives.empty() && derivatives.size() != values.size()))
    throw DimensionError("closures: list lengths differ");
  PerturbationBasis b;
  b.values_ = std::move(values);
  b.derivatives_ = std::move(derivatives);
  b.derivatives_.resize(b.values_.size());
  b.decay_ = std::move(decay);
  b.tag_ = "closures:n=" + std::to_string(b.decay_.size());
  return b;
}

bool PerturbationBasis::differentiable() const {
  if (!table_.empty()) return true;
  return std::all_of(derivatives_.begin(), derivatives_.end(), [](const Fn& f) { return bool(f); });
}

Vec2 PerturbationBasis::value(int n, double t) const {
  if (!table_.empty()) {
    const auto& c = table_.at(n);
    return {clenshaw(c.row(0), t), clenshaw(c.row(1), t)};
  }
  return values_.at(n)(t);
}

Vec2 PerturbationBasis::derivative(int n, double t) const {
  if (!table_.empty()) {
    const auto& c = table_.at(n);
    return {clenshaw(cheb_derivative(c.row(0)), t), clenshaw(cheb_derivative(c.row(1)), t)};
  }
  if (!derivatives_.at(n))
    throw UnsupportedError("perturbation term " + std::to_string(n) + " has no derivative");
  return derivatives_[n](t);
}

Vec2 PerturbationBasis::combine(const Eigen::Ref<const Eigen::VectorXd>& y, double t) const {
  Vec2 r = Vec2::Zero();
  for (int n = 0; n < size(); ++n)
    if (y[n] != 0.0) r += y[n] * value(n, t);
  return r;
}

Vec2 PerturbationBasis::combine_derivative(const Eigen::Ref<const Eigen::VectorXd>& y,
                                           double t) const {
  Vec2 r = Vec2::Zero();
  for (int n = 0; n < size(); ++n)
    if (y[n] != 0.0) r += y[n] * derivative(n, t);
  return r;
}

Arc::Arc(SegmentMeta segment, Eigen::VectorXd y, BasisPtr basis)
    : seg_(std::move(segment)), y_(std::move(y)), basis_(std::move(basis)),
      dir_(unit(seg_.orientation)) {
  const int expected = basis_ ? basis_->size() : 0;
  if (y_.size() != expected)
    throw DimensionError("arc parameter vector has length " + std::to_string(y_.size()) +
                         ", basis has " + std::to_string(expected) + " terms");
}

Arc::Arc(SegmentMeta segment) : Arc(std::move(segment), Eigen::VectorXd(), nullptr) {}

Vec2 Arc::operator()(double t) const {
  check_t(t);
  Vec2 r = seg_.center + seg_.half_length * t * dir_;
  if (basis_) r += basis_->combine(y_, t);
  return r;
}

Vec2 Arc::derivative(double t) const {
  check_t(t);
  Vec2 r = seg_.half_length * dir_;
  if (basis_) r += basis_->combine_derivative(y_, t);
  return r;
}

Arc Arc::translated(const Vec2& offset) const {
  SegmentMeta s = seg_;
  s.center += offset;
  return Arc(s, y_, basis_);
}

Mat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Arc generalized_arc(const Eigen::Ref<const Eigen::VectorXd>& y, const GlobalGeometry& geom,
                    const BasisPtr& basis) {
  if (y.size() != geom.s + 4)
    throw DimensionError("generalized_arc: expected " + std::to_string(geom.s + 4) +
                         " parameters, got " + std::to_string(y.size()));
  SegmentMeta seg;
  seg.center = 2.0 * geom.box_half_width * Vec2(y[0], y[1]);
  seg.half_length = geom.rho(y[2]);
  seg.orientation = geom.phi(y[3]);
  return Arc(seg, y.tail(geom.s), basis);
}

Eigen::VectorXd self_param(const Arc& arc, const GlobalGeometry& geom) {
  Eigen::VectorXd z(geom.s + 2);
  z[0] = geom.rho_inv(arc.half_length());
  z[1] = geom.phi_inv(arc.orientation());
  z.tail(geom.s) = arc.y();
  return z;
}

Arc self_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
             const BasisPtr& basis) {
  if (z.size() != geom.s + 2)
    throw DimensionError("self_arc: expected " + std::to_string(geom.s + 2) + " parameters");
  SegmentMeta seg;
  seg.half_length = geom.rho(z[0]);
  seg.orientation = geom.phi(z[1]);
  return Arc(seg, z.tail(geom.s), basis);
}

LiftedParam lift_pair(const Arc& arc_k, const Arc& arc_j, const GlobalGeometry& geom,
                      bool strict) {
  const int s = geom.s;
  if (arc_k.y().size() != s || arc_j.y().size() != s)
    throw DimensionError("lift_pair: arcs do not match the family dimension");
  const Vec2 diff = arc_j.center() - arc_k.center();
  const double d = diff.norm();
  const double slack = 1e-9 * geom.d_max;
  if (d == 0.0 || (strict && (d < geom.d_min - slack || d > geom.d_max + slack)))
    throw RangeError("lift_pair: center distance " + fmt(d) + " outside [" + fmt(geom.d_min) +
                     ", " + fmt(geom.d_max) + "]");
  double angle = std::atan2(diff[1], diff[0]);
  LiftedParam out;
  const Arc* a = &arc_k;
  const Arc* b = &arc_j;
  if (angle < 0.0 || angle >= pi) {
    out.transposed = true;
    std::swap(a, b);
    angle = angle < 0.0 ? angle + pi : angle - pi;
  }
  out.z.resize(2 * s + 6);
  out.z[0] = geom.rho_inv(a->half_length());
  out.z[1] = geom.phi_inv(a->orientation());
  out.z.segment(2, s) = a->y();
  out.z[s + 2] = geom.dist_inv(d);
  out.z[s + 3] = geom.phi_inv(angle);
  out.z[s + 4] = geom.rho_inv(b->half_length());
  out.z[s + 5] = geom.phi_inv(b->orientation());
  out.z.tail(s) = b->y();
  return out;
}

Arc h1_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
           const BasisPtr& basis) {
  const int s = geom.s;
  if (z.size() != 2 * s + 6) throw DimensionError("h1: lifted parameter has wrong length");
  SegmentMeta seg;
  seg.half_length = geom.rho(z[0]);
  seg.orientation = geom.phi(z[1]);
  return Arc(seg, z.segment(2, s), basis);
}

Arc h2_arc(const Eigen::Ref<const Eigen::VectorXd>& z, const GlobalGeometry& geom,
           const BasisPtr& basis) {
  const int s = geom.s;
  if (z.size() != 2 * s + 6) throw DimensionError("h2: lifted parameter has wrong length");
  SegmentMeta seg;
  seg.center = geom.dist(z[s + 2]) * unit(geom.phi(z[s + 3]));
  seg.half_length = geom.rho(z[s + 4]);
  seg.orientation = geom.phi(z[s + 5]);
  return Arc(seg, z.tail(s), basis);
}

Vec2 eval_h1(const Eigen::Ref<const Eigen::VectorXd>& z, double t, const GlobalGeometry& geom,
             const BasisPtr& basis) {
  return h1_arc(z, geom, basis)(t);
}

Vec2 eval_h2(const Eigen::Ref<const Eigen::VectorXd>& z, double t, const GlobalGeometry& geom,
             const BasisPtr& basis) {
  return h2_arc(z, geom, basis)(t);
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed || c.informational; });
}

ValidationReport validate_family(const GlobalGeometry& geom, const PerturbationBasis& basis,
                                 const std::vector<SegmentMeta>& segments,
                                 const ValidationOptions& opts) {
  ValidationReport rep;
  auto add = [&](std::string name, bool passed, std::string detail, bool info = false) {
    rep.checks.push_back({std::move(name), passed, info, std::move(detail)});
  };

  add("global parameters",
      geom.box_half_width > 0 && geom.r_min > 0 && geom.r_min < geom.r_max && geom.d_min > 0 &&
          geom.d_min < geom.d_max && geom.s == basis.size(),
      "B=" + fmt(geom.box_half_width) + " r=[" + fmt(geom.r_min) + "," + fmt(geom.r_max) +
          "] d=[" + fmt(geom.d_min) + "," + fmt(geom.d_max) + "] s=" + std::to_string(geom.s) +
          " basis terms=" + std::to_string(basis.size()));

  // summability proxy
  {
    bool finite = true;
    double total = 0.0;
    for (double b : basis.decay_norms()) {
      finite = finite && std::isfinite(b) && b >= 0.0;
      total += b;
    }
    bool tail = true;
    for (int n = std::max(basis.monotone_from(), 0) + 1; n < basis.size(); ++n)
      tail = tail && basis.decay(n) <= basis.decay(n - 1);
    add("decay summability", finite && tail,
        "sum b_n=" + fmt(total) + (tail ? ", tail non-increasing" : ", tail increases"));
  }

  const int nt = std::max(opts.t_grid, 2);
  std::vector<double> grid(nt);
  for (int i = 0; i < nt; ++i) grid[i] = -1.0 + 2.0 * i / (nt - 1);

  // disjointness: each arc lies within r_max + sup_t |sum y_n r_n(t)| of its center,
  // bounded componentwise using |y_n| <= 1/2
  {
    double sharp = 0.0, literal = 0.0;
    std::vector<double> sup_n(basis.size(), 0.0);
    for (double t : grid) {
      Vec2 acc = Vec2::Zero();
      for (int n = 0; n < basis.size(); ++n) {
        const Vec2 v = basis.value(n, t);
        acc += 0.5 * v.cwiseAbs();
        sup_n[n] = std::max(sup_n[n], v.norm());
      }
      sharp = std::max(sharp, acc.norm());
    }
    for (double v : sup_n) literal += v;
    const double need = 2.0 * (geom.r_max + sharp);
    add("disjointness", geom.d_min > need,
        "d_min=" + fmt(geom.d_min) + " vs 2(r_max+sup|perturbation|)=" + fmt(need));
    add("disjointness (coefficient-sum bound)", geom.d_min > 2.0 * (geom.r_max + literal),
        "2(r_max+sum sup|r_n|)=" + fmt(2.0 * (geom.r_max + literal)), true);
  }

  // derivative lower bound over sampled family members
  if (basis.differentiable()) {
    double strict = 0.0;
    for (double t : grid) {
      double acc = 0.0;
      for (int n = 0; n < basis.size(); ++n) acc += 0.5 * basis.derivative(n, t).norm();
      strict = std::max(strict, acc);
    }
    add("derivative bound (uniform)", geom.r_min > strict,
        "r_min=" + fmt(geom.r_min) + " vs sup sum |y_n r_n'|=" + fmt(strict), true);

    Halton h(basis.size() + 2, opts.seed);
    double worst = 1e300;
    Eigen::VectorXd y(basis.size());
    for (int i = 0; i < opts.family_samples; ++i) {
      const Eigen::VectorXd p = h.next();
      const double rho = geom.rho(p[0]);
      const Vec2 dir = unit(geom.phi(p[1]));
      y = p.tail(basis.size());
      for (double t : grid)
        worst = std::min(worst, (rho * dir + basis.combine_derivative(y, t)).norm());
    }
    add("derivative bound (sampled)", worst > 0.0 && std::isfinite(worst),
        "min |r'| over " + std::to_string(opts.family_samples) + " members=" + fmt(worst));
  } else {
    add("derivative bound (sampled)", false, "basis has no derivative");
  }

  // segments
  {
    bool ranges = true, box = true;
    std::string bad;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& sg = segments[i];
      if (sg.half_length < geom.r_min - 1e-12 || sg.half_length > geom.r_max + 1e-12 ||
          sg.orientation < 0.0 || sg.orientation >= pi) {
        ranges = false;
        bad = "segment " + std::to_string(i);
      }
      if (sg.center.cwiseAbs().maxCoeff() > geom.box_half_width + 1e-12) box = false;
    }
    if (!segments.empty()) {
      add("segment ranges", ranges, ranges ? "all in range" : bad + " out of range");
      add("centers in box", box, box ? "all inside" : "center outside box");
      double lo = 1e300, hi = 0.0;
      for (std::size_t i = 0; i < segments.size(); ++i)
        for (std::size_t j = i + 1; j < segments.size(); ++j) {
          const double d = (segments[i].center - segments[j].center).norm();
          lo = std::min(lo, d);
          hi = std::max(hi, d);
        }
      const bool dist = segments.size() < 2 ||
                        (lo >= geom.d_min * (1 - 1e-12) && hi <= geom.d_max * (1 + 1e-12));
      add("center distances", dist,
          segments.size() < 2 ? "single arc" : "min=" + fmt(lo) + " max=" + fmt(hi));
    }
  }
  return rep;
}

std::vector<Arc> sample_configuration(int M, const GlobalGeometry& geom, const BasisPtr& basis,
                                      std::uint64_t seed) {
  if (M < 1) throw DimensionError("sample_configuration: need at least one arc");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double spacing = geom.d_min * 1.01;
  const double jitter = geom.d_min * 0.004;
  const double reach = 0.5 * geom.d_max - jitter;
  const double box = geom.box_half_width - jitter;
  const int span = static_cast<int>(std::ceil(2.0 * geom.box_half_width * 1.5 / spacing)) + 2;

  std::vector<Vec2> chosen;
  for (int attempt = 0; attempt < 2000 && chosen.empty(); ++attempt) {
    const Mat2 rot = rotation(pi * u01(rng));
    const Vec2 shift(spacing * u01(rng), spacing * u01(rng));
    std::vector<Vec2> pts;
    for (int a = -span; a <= span; ++a)
      for (int b = -span; b <= span; ++b) {
        Vec2 p = rot * (Vec2(a + 0.5 * b, 0.5 * std::sqrt(3.0) * b) * spacing + shift);
        if (p.cwiseAbs().maxCoeff() <= box && (M == 1 || p.norm() <= reach)) pts.push_back(p);
      }
    if (static_cast<int>(pts.size()) < M) continue;
    std::shuffle(pts.begin(), pts.end(), rng);
    pts.resize(M);
    chosen = pts;
  }
  if (chosen.empty())
    throw RangeError("sample_configuration: cannot place " + std::to_string(M) +
                     " arcs with the given distance bounds");

  std::vector<Arc> arcs;
  for (auto& c : chosen) {
    const double a = 2.0 * pi * u01(rng);
    c += jitter * u01(rng) * unit(a);
    SegmentMeta seg;
    seg.center = c;
    seg.half_length = geom.r_min + (geom.r_max - geom.r_min) * u01(rng);
    seg.orientation = pi * u01(rng);
    if (seg.orientation >= pi) seg.orientation = 0.0;
    Eigen::VectorXd y(basis ? basis->size() : 0);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = u01(rng) - 0.5;
    arcs.emplace_back(seg, y, basis);
  }
  return arcs;
}

}  // namespace arcrom
