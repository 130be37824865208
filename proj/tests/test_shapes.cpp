#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "starshape/rng.hpp"
#include "starshape/shapes.hpp"

using namespace starshape;

namespace {

std::vector<ShapePtr> all_shapes() {
  std::vector<ShapePtr> v;
  v.push_back(std::make_shared<Ellipsoid>(2, std::vector<double>{1.0, 0.1, 0.1, 1.0}));
  v.push_back(std::make_shared<Ellipsoid>(
      3, std::vector<double>{1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 2.0}));
  v.push_back(std::make_shared<LpBall>(1.0, 2));
  v.push_back(std::make_shared<LpBall>(1.5, 2));
  v.push_back(std::make_shared<LpBall>(2.0, 2));
  v.push_back(std::make_shared<LpBall>(4.0, 2));
  v.push_back(std::make_shared<LpBall>(kInf, 2));
  v.push_back(std::make_shared<LpBall>(2.5, 3));
  v.push_back(std::make_shared<OffCenterBall>(Vec{0.5, -0.25}));
  v.push_back(std::make_shared<MetaTShape>(1.0));
  v.push_back(std::make_shared<SkewLimitShape>(
      2, std::vector<double>{1.0, 0.0, 0.0, 1.0}, Vec{-1.0, 3.0}));
  v.push_back(std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(
      {Vec{1.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}})));
  v.push_back(std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(
      {Vec{1.0, -1.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}})));
  return v;
}

Vec random_point(Rng& r, int d, double half_width) {
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = r.uniform(-half_width, half_width);
  return x;
}

}  // namespace

TEST_CASE("gauge values at known points") {
  LpBall disk(2.0, 2);
  CHECK(disk.gauge(Vec{1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));

  MetaTShape meta(1.0);
  CHECK(meta.gauge(Vec{1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));

  Ellipsoid ell(2, {1.0, 0.1, 0.1, 1.0});
  CHECK(ell.gauge(Vec{1.0, 0.1}) == doctest::Approx(1.0).epsilon(1e-12));

  OffCenterBall ball0(Vec{0.0, 0.0});
  Rng r(5, 0);
  for (int k = 0; k < 100; ++k) {
    Vec x = random_point(r, 2, 3.0);
    CHECK(ball0.gauge(x) == doctest::Approx(norm2(x)).epsilon(1e-12));
  }
}

TEST_CASE("gauge is zero only at the origin and infinite outside cones") {
  auto tri = PolytopeShape::from_vertices(
      {Vec{1.0, -1.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}});
  CHECK(tri.gauge(Vec{0.0, 0.0}) == 0.0);
  CHECK(std::isinf(tri.gauge(Vec{1.0, 1.0})));
  CHECK(std::isinf(tri.gauge(Vec{1.0, -1.0})));  // boundary ray of the cone
  CHECK(tri.gauge(Vec{0.5, -1.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tri.gauge(Vec{-0.25, -0.25}) > 0.0);
  for (const auto& s : all_shapes()) {
    CHECK(s->gauge(Vec(s->dim(), 0.0)) == 0.0);
  }
}

TEST_CASE("homogeneity along random rays") {
  Rng r(11, 0);
  for (const auto& s : all_shapes()) {
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec x = random_point(r, s->dim(), 2.0);
      double t = std::exp(r.uniform(std::log(0.1), std::log(10.0)));
      double g = s->gauge(x);
      double gt = s->gauge(t * x);
      if (std::isinf(g)) {
        if (!std::isinf(gt)) ++bad;
      } else if (std::fabs(gt - t * g) > 1e-9 * std::max(1e-300, gt)) {
        ++bad;
      }
    }
    CHECK_MESSAGE(bad == 0, s->label());
  }
}

TEST_CASE("gauge dominates the bounding box lower bound") {
  Rng r(12, 0);
  for (const auto& s : all_shapes()) {
    double R = s->bounding_box().bounding_radius();
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec x = random_point(r, s->dim(), 2.0);
      if (s->gauge(x) < norm_inf(x) / R - 1e-12) ++bad;
    }
    CHECK_MESSAGE(bad == 0, s->label());
  }
}

TEST_CASE("boundary points have unit gauge") {
  Rng r(13, 0);
  for (const auto& s : all_shapes()) {
    int bad = 0, used = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec u = random_point(r, s->dim(), 1.0);
      double g = s->gauge(u);
      if (!(g > 0.0) || std::isinf(g)) continue;
      ++used;
      if (std::fabs(s->gauge(boundary_point(*s, u)) - 1.0) > 1e-9) ++bad;
    }
    CHECK_MESSAGE(bad == 0, s->label());
    CHECK(used > 100);
  }
}

TEST_CASE("boundary point examples") {
  LpBall l1(1.0, 2);
  Vec p = boundary_point(l1, Vec{1.0, 1.0});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));

  MetaTShape meta(1.0);
  Vec q = boundary_point(meta, Vec{1.0, 0.0});
  CHECK(q[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.0));

  Ellipsoid ident(2, {1.0, 0.0, 0.0, 1.0});
  Vec e = boundary_point(ident, Vec{3.0, 4.0});
  CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(0.8).epsilon(1e-12));

  auto tri = PolytopeShape::from_vertices(
      {Vec{1.0, -1.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}});
  CHECK_THROWS_AS(boundary_point(tri, Vec{1.0, 1.0}), DirectionOutsideCone);
  CHECK_THROWS_AS(boundary_point(tri, Vec{0.0, 0.0}), DirectionOutsideCone);
}

TEST_CASE("convexity probe on convex shapes") {
  Rng r(14, 0);
  for (const auto& s : all_shapes()) {
    if (!s->convex()) continue;
    int bad = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec x = random_point(r, s->dim(), 2.0);
      Vec y = random_point(r, s->dim(), 2.0);
      double gx = s->gauge(x), gy = s->gauge(y);
      if (std::isinf(gx) || std::isinf(gy)) continue;
      double gm = s->gauge(0.5 * (x + y));
      if (gm > 0.5 * gx + 0.5 * gy + 1e-9) ++bad;
    }
    CHECK_MESSAGE(bad == 0, s->label());
  }
}

TEST_CASE("meta t shape is genuinely non convex") {
  MetaTShape meta(1.0);
  Vec x{0.9, 0.9}, y{0.9, -0.9};
  CHECK(meta.gauge(x) < 1.0);
  CHECK(meta.gauge(y) < 1.0);
  CHECK(meta.gauge(0.5 * (x + y)) > 1.0);
}

TEST_CASE("coordinate extrema: analytic values") {
  for (double p : {1.0, 1.5, 2.0, 4.0, kInf}) {
    Extrema e = coordinate_extrema(LpBall(p, 2));
    for (int i = 0; i < 2; ++i) {
      CHECK(e.b[i] == doctest::Approx(1.0));
      CHECK(e.a[i] == doctest::Approx(-1.0));
    }
  }
  Ellipsoid ell(3, {1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 2.0});
  Extrema e = coordinate_extrema(ell);
  CHECK(e.b[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.b[1] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK(e.b[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  auto tri = PolytopeShape::from_vertices(
      {Vec{1.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}});
  Extrema t = coordinate_extrema(tri);
  CHECK(t.b[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.b[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.a[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(t.a[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("numeric extrema agree with analytic overrides") {
  // d = 2 ellipsoid
  {
    Ellipsoid ell(2, {1.0, 0.1, 0.1, 1.0});
    Extrema n = numeric_coordinate_extrema(ell);
    for (int i = 0; i < 2; ++i) {
      CHECK(n.b[i] == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(n.a[i] == doctest::Approx(-1.0).epsilon(1e-6));
    }
  }
  // d = 3 ellipsoid
  {
    Ellipsoid ell(3, {1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 2.0});
    Extrema n = numeric_coordinate_extrema(ell);
    CHECK(n.b[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(n.b[1] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-6));
    CHECK(n.b[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  // polytope with a corner maximum (kink in the scan objective)
  {
    auto tri = PolytopeShape::from_vertices(
        {Vec{1.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}});
    Extrema n = numeric_coordinate_extrema(tri);
    CHECK(n.b[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(n.b[1] == doctest::Approx(1.0).epsilon(1e-6));
  }
  // meta t: diagonal maximum
  {
    Extrema n = numeric_coordinate_extrema(MetaTShape(1.0));
    CHECK(n.b[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(n.a[1] == doctest::Approx(-1.0).epsilon(1e-6));
  }
}

TEST_CASE("skew limit shape extrema match the closed form") {
  // Omega = I, alpha = (-1, 3): on the squeezed side the boundary is the
  // ellipsoid of M = (I + alpha alpha')^{-1}; Sherman-Morrison gives
  // M_11 = 10/11 and M_22 = 2/11, and the extremizing directions
  // +-M e_i / sqrt(M_ii) land on the valid half-space for b1 and a2.
  SkewLimitShape skew(2, {1.0, 0.0, 0.0, 1.0}, Vec{-1.0, 3.0});
  Extrema n = numeric_coordinate_extrema(skew);
  CHECK(n.b[0] == doctest::Approx(std::sqrt(10.0 / 11.0)).epsilon(1e-6));
  CHECK(n.b[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(n.a[0] == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(n.a[1] == doctest::Approx(-std::sqrt(2.0 / 11.0)).epsilon(1e-6));
  Extrema e = coordinate_extrema(skew);  // no analytic override: same path
  CHECK(e.b[0] == doctest::Approx(n.b[0]));
}

TEST_CASE("projection gauge equals gauge in two dimensions") {
  Ellipsoid ell(2, {1.0, 0.1, 0.1, 1.0});
  Rng r(15, 0);
  for (int k = 0; k < 50; ++k) {
    Vec u = random_point(r, 2, 2.0);
    CHECK(projection_gauge(ell, 0, 1, u) ==
          doctest::Approx(ell.gauge(u)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(projection_gauge(ell, 0, 0, Vec{1.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("projection gauge of an ellipsoid matches the submatrix ellipsoid") {
  Ellipsoid ell(3, {1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 2.0});
  SmallSpd sub01(2, {1.0, 0.3, 0.3, 1.5});
  SmallSpd sub02(2, {1.0, -0.2, -0.2, 2.0});
  Rng r(16, 0);
  for (int k = 0; k < 25; ++k) {
    Vec u = random_point(r, 2, 1.5);
    double expect01 = std::sqrt(sub01.quadratic_form_inv(u));
    CHECK(projection_gauge(ell, 0, 1, u) ==
          doctest::Approx(expect01).epsilon(1e-6));
    double expect02 = std::sqrt(sub02.quadratic_form_inv(u));
    CHECK(projection_gauge(ell, 0, 2, u) ==
          doctest::Approx(expect02).epsilon(1e-6));
  }
}

TEST_CASE("projection gauge is a lower bound attained at the minimizer") {
  LpBall ball(2.5, 3);
  Rng r(17, 0);
  for (int k = 0; k < 25; ++k) {
    Vec u = random_point(r, 2, 1.5);
    double pg = projection_gauge(ball, 0, 1, u);
    for (int probe = 0; probe < 20; ++probe) {
      Vec x{u[0], u[1], r.uniform(-2.0, 2.0)};
      CHECK(pg <= ball.gauge(x) + 1e-9);
    }
  }
  CHECK(projection_gauge(ball, 0, 1, Vec{1.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(projection_gauge(ball, 1, 2, Vec{1.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bluntness verdicts across the built-in shapes") {
  auto check = [](const StarShape& s, BluntVerdict expect, double g_expect) {
    BluntReport rep = is_blunt(s, 0, 1);
    CHECK_MESSAGE(rep.verdict == expect, s.label());
    if (std::isinf(g_expect))
      CHECK(std::isinf(rep.witness));
    else
      CHECK(rep.witness == doctest::Approx(g_expect).epsilon(1e-6));
  };

  for (double p : {1.0, 1.5, 2.0, 4.0})
    check(LpBall(p, 2), BluntVerdict::Blunt, std::pow(2.0, 1.0 / p));
  check(LpBall(kInf, 2), BluntVerdict::NonBlunt, 1.0);
  check(Ellipsoid(2, {1.0, 0.1, 0.1, 1.0}), BluntVerdict::Blunt,
        std::sqrt(2.0 / 1.1));
  check(SkewLimitShape(2, {1.0, 0.0, 0.0, 1.0}, Vec{-1.0, 3.0}),
        BluntVerdict::Blunt, std::sqrt(21.0 / 11.0));
  check(MetaTShape(1.0), BluntVerdict::NonBlunt, 1.0);
  check(PolytopeShape::from_vertices(
            {Vec{1.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}}),
        BluntVerdict::NonBlunt, 1.0);
  check(PolytopeShape::from_vertices(
            {Vec{1.0, -1.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}}),
        BluntVerdict::Blunt, kInf);

  OffCenterBall off(Vec{0.5, 0.0});
  double R = off.radius();
  Vec b{0.5 + R, R};
  double expect = -dot(off.beta(), b) +
                  std::sqrt(std::pow(dot(off.beta(), b), 2) + dot(b, b));
  check(off, BluntVerdict::Blunt, expect);
}

TEST_CASE("blunt verdict of a three dimensional projection") {
  // l1 ball in d=3: every bivariate projection is the 2-D l1 ball
  LpBall l1(1.0, 3);
  BluntReport rep = is_blunt(l1, 0, 2);
  CHECK(rep.verdict == BluntVerdict::Blunt);
  CHECK(rep.witness == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("volume estimates with analytic cross checks") {
  struct Row {
    ShapePtr shape;
    double expect;
  };
  std::vector<Row> rows;
  rows.push_back({std::make_shared<LpBall>(2.0, 2), std::numbers::pi});
  rows.push_back({std::make_shared<LpBall>(1.0, 2), 2.0});
  rows.push_back({std::make_shared<PolytopeShape>(PolytopeShape::from_vertices(
                      {Vec{1.0, 1.0}, Vec{-1.0, 0.0}, Vec{0.0, -1.0}})),
                  1.5});
  rows.push_back({std::make_shared<MetaTShape>(1.0),
                  4.0 / std::sqrt(2.0) * std::atanh(1.0 / std::sqrt(2.0))});
  rows.push_back({std::make_shared<SkewLimitShape>(
                      2, std::vector<double>{1.0, 0.0, 0.0, 1.0}, Vec{-1.0, 3.0}),
                  0.5 * std::numbers::pi * (1.0 + 1.0 / std::sqrt(11.0))});
  rows.push_back({std::make_shared<OffCenterBall>(Vec{0.5, -0.25}),
                  std::numbers::pi * 1.3125});

  for (const auto& row : rows) {
    McEstimate est = volume(*row.shape, 1000000, 99);
    CHECK_MESSAGE(std::fabs(est.value - row.expect) <= 3.0 * est.std_error,
                  row.shape->label());
    if (auto av = row.shape->analytic_volume())
      CHECK(*av == doctest::Approx(row.expect).epsilon(1e-12));
  }
}

TEST_CASE("volume is deterministic and thread count independent") {
  LpBall ball(3.0, 2);
  McEstimate a = volume(ball, 200000, 7, 1);
  McEstimate b = volume(ball, 200000, 7, 4);
  McEstimate c = volume(ball, 200000, 7, 8);
  CHECK(a.value == b.value);  // bitwise
  CHECK(a.value == c.value);
  CHECK(a.std_error == b.std_error);
  McEstimate d = volume(ball, 200000, 8, 1);
  CHECK(a.value != d.value);
}

TEST_CASE("volume argument validation") {
  LpBall ball(2.0, 2);
  CHECK_THROWS_AS(volume(ball, 999, 1), std::invalid_argument);

  struct FlatShape : StarShape {
    FlatShape() : StarShape(2, "flat") {
      set_box(Box{Vec{0.0, -1.0}, Vec{0.0, 1.0}});
    }
    double gauge(const Vec& x) const override { return norm2(x); }
    bool convex() const override { return true; }
  };
  CHECK_THROWS_AS(volume(FlatShape(), 10000, 1), DegenerateBox);
}

TEST_CASE("polytope constructor rejects bad systems") {
  CHECK_THROWS_AS(PolytopeShape(2, {Vec{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(PolytopeShape(2, {Vec{1.0, 0.0}, Vec{-1.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PolytopeShape(2, {}), std::invalid_argument);
  CHECK_THROWS_AS(PolytopeShape::from_vertices({Vec{1.0, 0.0}, Vec{0.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("shape constructor validation") {
  CHECK_THROWS_AS(LpBall(0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(MetaTShape(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MetaTShape(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(SkewLimitShape(2, {1.0, 0.0, 0.0, 1.0}, Vec{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Ellipsoid(2, {1.0, 2.0, 2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Ellipsoid(2, {1.0, 0.2, 0.3, 1.0}), std::invalid_argument);
}

TEST_CASE("polytope vertices are recovered") {
  auto tri = PolytopeShape::from_vertices(
      {Vec{1.0, -1.0}, Vec{-1.0, 1.0}, Vec{-1.0, -1.0}});
  CHECK(tri.vertices().size() == 3);
  CHECK(tri.cone_facets().size() == 1);
  CHECK(tri.facets().size() == 2);
  auto has_vertex = [&](double x, double y) {
    for (const Vec& v : tri.vertices())
      if (std::fabs(v[0] - x) < 1e-9 && std::fabs(v[1] - y) < 1e-9) return true;
    return false;
  };
  CHECK(has_vertex(1.0, -1.0));
  CHECK(has_vertex(-1.0, 1.0));
  CHECK(has_vertex(-1.0, -1.0));
  CHECK(*tri.analytic_volume() == doctest::Approx(2.0).epsilon(1e-12));
}
