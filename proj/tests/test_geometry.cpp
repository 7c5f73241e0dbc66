#include <doctest.h>

#include <cmath>

#include "arcrom/geometry.hpp"
#include "arcrom/sampling.hpp"

using namespace arcrom;

namespace {

GlobalGeometry sixteen_arc_geometry() { return GlobalGeometry{10.0, 0.56, 0.93, 5.0, 21.0, 12}; }

BasisPtr sixteen_arc_basis() {
  return std::make_shared<PerturbationBasis>(PerturbationBasis::trigonometric(12));
}

BasisPtr single_term_basis() {
  return std::make_shared<PerturbationBasis>(PerturbationBasis::closures(
      {[](double t) { return Vec2(0.1 * std::sin(t), 0.05 * t * t); }},
      {[](double t) { return Vec2(0.1 * std::cos(t), 0.1 * t); }}, {0.12}));
}

}  // namespace

TEST_CASE("straight segments") {
  Arc a(SegmentMeta{Vec2(0, 0), 1.0, 0.0});
  CHECK((a(0.5) - Vec2(0.5, 0)).norm() < 1e-15);
  CHECK((a.derivative(0.3) - Vec2(1, 0)).norm() < 1e-15);
  Arc b(SegmentMeta{Vec2(0, 0), 2.0, 0.0});
  CHECK((b.derivative(-0.7) - Vec2(2, 0)).norm() < 1e-15);

  GlobalGeometry g{10.0, 0.5, 1.5, 5.0, 21.0, 0};
  Arc v(SegmentMeta{Vec2(1, 2), 1.0, g.phi(0.0)});
  CHECK((v(1.0) - Vec2(1, 3)).norm() < 1e-15);
  CHECK_THROWS_AS(a(1.5), DomainError);
  CHECK_THROWS_AS(a.derivative(-1.01), DomainError);
}

TEST_CASE("affine maps") {
  const auto g = sixteen_arc_geometry();
  CHECK(g.rho(-0.5) == doctest::Approx(0.56));
  CHECK(g.rho(0.5) == doctest::Approx(0.93));
  CHECK(g.phi(-0.5) == 0.0);
  CHECK(g.phi(0.5) == doctest::Approx(pi));
  CHECK(g.dist(-0.5) == doctest::Approx(5.0));
  for (double z : {-0.5, -0.2, 0.0, 0.31, 0.5}) {
    CHECK(std::abs(g.rho_inv(g.rho(z)) - z) < 1e-14);
    CHECK(std::abs(g.phi_inv(g.phi(z)) - z) < 1e-14);
    CHECK(std::abs(g.dist_inv(g.dist(z)) - z) < 1e-14);
  }
}

TEST_CASE("rotation matrices") {
  CHECK((rotation(0.0) - Mat2::Identity()).norm() == 0.0);
  Mat2 q;
  q << 0, -1, 1, 0;
  CHECK((rotation(pi / 2) - q).norm() < 1e-15);
  CHECK((rotation(0.7) * Vec2(1, 0) - unit(0.7)).norm() < 1e-15);
  for (double th : {-3.0, -0.4, 0.0, 1.1, 2.9, 17.0}) {
    CHECK((rotation(th) * rotation(-th) - Mat2::Identity()).norm() < 1e-14);
    CHECK(rotation(th).determinant() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("generalized arc at the center of the parameter box") {
  const auto g = sixteen_arc_geometry();
  const auto basis = sixteen_arc_basis();
  Arc a = generalized_arc(Eigen::VectorXd::Zero(16), g, basis);
  CHECK(a.center().norm() == 0.0);
  CHECK(a.half_length() == doctest::Approx(0.745));
  CHECK(a.orientation() == doctest::Approx(pi / 2));
  CHECK_THROWS_AS(generalized_arc(Eigen::VectorXd::Zero(15), g, basis), DimensionError);
}

TEST_CASE("trigonometric basis layout and decay") {
  const auto b = PerturbationBasis::trigonometric(12);
  CHECK(b.size() == 12);
  // 1-based term 2 is c_1 cos(0 t) e_1, term 1 is c_1 sin(t) e_1, term 8 is c_1 cos(0 t) e_2
  CHECK((b.value(1, 0.3) - Vec2(1, 0)).norm() < 1e-15);
  CHECK((b.value(0, 0.3) - Vec2(std::sin(0.3), 0)).norm() < 1e-15);
  CHECK((b.value(7, 0.3) - Vec2(0, 1)).norm() < 1e-15);
  CHECK((b.value(3, 0.3) - Vec2(std::pow(2.0, -2.5) * std::cos(0.3), 0)).norm() < 1e-15);
  for (int n = 0; n < 12; ++n)
    for (double t = -1; t <= 1; t += 0.01) CHECK(b.value(n, t).norm() <= b.decay(n) * (1 + 1e-14));
  for (int n = b.monotone_from() + 1; n < 12; ++n) CHECK(b.decay(n) <= b.decay(n - 1));
}

TEST_CASE("analytic derivative against central differences") {
  const auto g = sixteen_arc_geometry();
  const auto basis = sixteen_arc_basis();
  Halton h(16, 3);
  for (int k = 0; k < 5; ++k) {
    Arc a = generalized_arc(h.next(), g, basis);
    const double step = 1e-5;
    for (double t : {-0.9, -0.3, 0.0, 0.45, 0.99 - step}) {
      const Vec2 fd = (a(t + step) - a(t - step)) / (2 * step);
      CHECK((fd - a.derivative(t)).norm() < 1e-6);
    }
  }
}

TEST_CASE("chebyshev table basis") {
  Eigen::MatrixXd c(2, 4);
  c << 0.1, 0.2, -0.05, 0.03,  //
      0.0, -0.1, 0.02, 0.01;
  auto basis = PerturbationBasis::chebyshev_table({c});
  for (double t : {-1.0, -0.4, 0.2, 1.0}) {
    const double T[4] = {1, t, 2 * t * t - 1, 4 * t * t * t - 3 * t};
    const double dT[4] = {0, 1, 4 * t, 12 * t * t - 3};
    Vec2 v = Vec2::Zero(), dv = Vec2::Zero();
    for (int k = 0; k < 4; ++k) {
      v += T[k] * c.col(k);
      dv += dT[k] * c.col(k);
    }
    CHECK((basis.value(0, t) - v).norm() < 1e-15);
    CHECK((basis.derivative(0, t) - dv).norm() < 1e-14);
    CHECK(basis.value(0, t).norm() <= basis.decay(0) * (1 + 1e-14));
  }
  auto no_deriv = PerturbationBasis::closures({[](double t) { return Vec2(t, 0); }}, {}, {1.0});
  CHECK_THROWS_AS(no_deriv.derivative(0, 0.1), UnsupportedError);
  CHECK_FALSE(no_deriv.differentiable());
}

TEST_CASE("sampled sixteen-arc member stays in the box") {
  const auto g = sixteen_arc_geometry();
  const auto basis = sixteen_arc_basis();
  const auto arcs = sample_configuration(16, g, basis, 11);
  int checked = 0;
  for (const auto& a : arcs) {
    if (a.center().cwiseAbs().maxCoeff() > 7.5) continue;
    ++checked;
    for (int i = 0; i <= 1000; ++i) CHECK(a(-1.0 + 2.0 * i / 1000).cwiseAbs().maxCoeff() <= 10.0);
  }
  CHECK(checked > 0);
}

TEST_CASE("lift of a hand-built pair") {
  GlobalGeometry g{10.0, 0.5, 1.5, 5.0, 21.0, 1};
  const auto basis = single_term_basis();
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
  Arc ak(SegmentMeta{Vec2(0, 0), 0.5, 0.0}, y0, basis);
  Arc aj(SegmentMeta{Vec2(5, 0), 0.5, 0.0}, y0, basis);
  const auto lp = lift_pair(ak, aj, g);
  Eigen::VectorXd expected(8);
  expected << -0.5, -0.5, 0.0, -0.5, -0.5, -0.5, -0.5, 0.0;
  CHECK(!lp.transposed);
  CHECK((lp.z - expected).norm() < 1e-15);

  Arc mid(SegmentMeta{Vec2(0, 0), 1.0, 0.0}, y0, basis);
  CHECK(lift_pair(mid, aj, g).z[0] == doctest::Approx(0.0));

  Arc near(SegmentMeta{Vec2(2.5, 0), 0.5, 0.0}, y0, basis);
  CHECK_THROWS_AS(lift_pair(ak, near, g), RangeError);
}

TEST_CASE("lifted arcs reproduce the pair up to translation") {
  const auto g = sixteen_arc_geometry();
  const auto basis = sixteen_arc_basis();
  const auto arcs = sample_configuration(6, g, basis, 5);
  int transposed = 0;
  for (std::size_t k = 0; k < arcs.size(); ++k)
    for (std::size_t j = 0; j < arcs.size(); ++j) {
      if (k == j) continue;
      const auto lp = lift_pair(arcs[k], arcs[j], g);
      CHECK(lp.z.size() == 2 * g.s + 6);
      CHECK(lp.z.cwiseAbs().maxCoeff() <= 0.5 + 1e-12);
      const Arc& a = lp.transposed ? arcs[j] : arcs[k];
      const Arc& b = lp.transposed ? arcs[k] : arcs[j];
      transposed += lp.transposed;
      for (double t : {-1.0, -0.3, 0.4, 1.0}) {
        CHECK((eval_h1(lp.z, t, g, basis) - (a(t) - a.center())).norm() < 1e-12);
        CHECK((eval_h2(lp.z, t, g, basis) - (b(t) - a.center())).norm() < 1e-12);
      }
    }
  CHECK(transposed == 15);
}

TEST_CASE("family validation") {
  const auto g = sixteen_arc_geometry();
  const auto basis = sixteen_arc_basis();
  std::vector<SegmentMeta> segs;
  for (const auto& a : sample_configuration(16, g, basis, 1)) segs.push_back(a.segment());
  const auto rep = validate_family(g, *basis, segs);
  for (const auto& c : rep.checks) INFO(c.name << ": " << c.detail);
  CHECK(rep.ok());

  auto close = segs;
  close[1].center = close[0].center + Vec2(g.d_min / 2, 0);
  CHECK_FALSE(validate_family(g, *basis, close).ok());

  auto big = std::make_shared<PerturbationBasis>(PerturbationBasis::trigonometric(12, 100.0));
  CHECK_FALSE(validate_family(g, *big, segs).ok());

  GlobalGeometry g36{10.0, 0.35, 0.55, 3.0, 20.0 * std::sqrt(2.0), 12};
  auto b36 = std::make_shared<PerturbationBasis>(PerturbationBasis::trigonometric(12, 0.55));
  std::vector<SegmentMeta> s36;
  for (const auto& a : sample_configuration(36, g36, b36, 2)) s36.push_back(a.segment());
  CHECK(validate_family(g36, *b36, s36).ok());
}

TEST_CASE("halton determinism and range") {
  Halton a(5, 42), b(5, 42), c(5, 43);
  const auto ma = a.take(50), mb = b.take(50), mc = c.take(50);
  CHECK(ma == mb);
  CHECK(ma != mc);
  CHECK(ma.cwiseAbs().maxCoeff() <= 0.5);
  CHECK(std::abs(ma.col(0).mean()) < 0.05);
}
