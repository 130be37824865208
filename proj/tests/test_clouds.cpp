#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "starshape/clouds.hpp"

using namespace starshape;

namespace {

std::shared_ptr<Ellipsoid> unit_disk() {
  return std::make_shared<Ellipsoid>(2, std::vector<double>{1, 0, 0, 1});
}

std::shared_ptr<HomotheticDensity> gaussian_disk() {
  return std::make_shared<HomotheticDensity>(
      unit_disk(), std::make_shared<WeibullGenerator>(2.0, std::numbers::sqrt2));
}

std::shared_ptr<HomotheticDensity> pareto_disk(double lambda) {
  return std::make_shared<HomotheticDensity>(
      unit_disk(), std::make_shared<ParetoGenerator>(lambda, 2));
}

struct UniformDisk : Density {
  UniformDisk() : Density(2, "uniform-disk") {}
  double log_pdf(const Vec& x) const override {
    return x[0] * x[0] + x[1] * x[1] <= 1.0 ? -std::log(std::numbers::pi)
                                            : -kInf;
  }
  Box integration_box() const override {
    return Box{Vec{-1.0, -1.0}, Vec{1.0, 1.0}};
  }
  void draw(Rng& rng, Vec& out) const override {
    for (;;) {
      double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
      if (x * x + y * y <= 1.0) {
        out[0] = x;
        out[1] = y;
        return;
      }
    }
  }
};

SampleCloud manual_cloud(const std::vector<Vec>& pts, double s_n = 1.0) {
  SampleCloud c;
  c.raw = Matrix(pts.size(), 2);
  c.scaled = Matrix(pts.size(), 2);
  c.s_n = s_n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.raw.set_point(i, Vec{pts[i][0] * s_n, pts[i][1] * s_n});
    c.scaled.set_point(i, pts[i]);
  }
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("cloud scaling solves the light tail equation and keeps raw data") {
  auto gd = gaussian_disk();
  const std::size_t n = 2000;
  SampleCloud c = make_cloud(*gd, n, 3);
  // n s^2 f0(s) = 1 with f0(s) = exp(-s^2/2)
  double res = std::log(double(n)) + 2.0 * std::log(c.s_n) - 0.5 * c.s_n * c.s_n;
  CHECK(std::fabs(res) < 1e-9);
  CHECK(c.raw.storage() == gd->sample(n, 3).storage());
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(c.scaled.row(i)[j] == c.raw.row(i)[j] / c.s_n);
  CHECK(c.label == gd->label());
  CHECK(c.seed == 3);
  CHECK(c.n() == n);
  CHECK(c.dim() == 2);
}

TEST_CASE("explicit scale override and the single point cloud") {
  auto gd = gaussian_disk();
  SampleCloud one = make_cloud(*gd, 1, 9, 2.5);
  CHECK(one.s_n == 2.5);
  CHECK(one.n() == 1);
  CHECK(one.scaled.row(0)[0] == one.raw.row(0)[0] / 2.5);

  double s = std::sqrt(2.0 * std::log(1e5));
  SampleCloud c = make_cloud(*gd, 100000, 11, s);
  CHECK(c.s_n == s);
}

TEST_CASE("cloud construction refuses heavy tails without a scale") {
  auto pd = pareto_disk(1.0);
  CHECK_THROWS_AS(make_cloud(*pd, 1000, 1), HeavyTailUnsupported);
  MetaTDensity mt(1.0);
  CHECK_THROWS_AS(make_cloud(mt, 1000, 1), HeavyTailUnsupported);
  SampleCloud c = make_cloud(*pd, 100, 1, 50.0);
  CHECK(c.s_n == 50.0);
  CHECK(c.n() == 100);
}

TEST_CASE("concentration report accepts the properly scaled gaussian cloud") {
  auto gd = gaussian_disk();
  auto disk = unit_disk();
  const std::size_t n = 100000;
  SampleCloud c = make_cloud(*gd, n, 11, std::sqrt(2.0 * std::log(double(n))));
  ConvergenceReport r = convergence_report(c, *disk, 0.15, 64, 3, 0.25);
  CHECK(r.clause_a);
  CHECK(double(r.outside_count) <= 0.01 * double(n));
  CHECK(r.probe_hits.size() == 64);
  CHECK(r.probes.rows() == 64);
  for (std::size_t k = 0; k < r.probes.rows(); ++k) {
    const double* p = r.probes.row(k);
    CHECK(std::sqrt(p[0] * p[0] + p[1] * p[1]) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // per ball medians over seeds are comfortably above 3 even though a
  // single cloud's worst ball often holds fewer
  std::vector<std::vector<double>> per_ball(64);
  for (std::uint64_t seed = 1; seed <= 9; ++seed) {
    SampleCloud cs =
        make_cloud(*gd, n, seed, std::sqrt(2.0 * std::log(double(n))));
    ConvergenceReport rs = convergence_report(cs, *disk, 0.15, 64, 3, 0.25);
    for (std::size_t k = 0; k < 64; ++k)
      per_ball[k].push_back(double(rs.probe_hits[k]));
  }
  for (std::size_t k = 0; k < 64; ++k) CHECK(median(per_ball[k]) >= 3.0);
}

TEST_CASE("uniform cloud on the body never leaves it") {
  UniformDisk den;
  SampleCloud c = make_cloud(den, 5000, 4, 1.0);
  ConvergenceReport r = convergence_report(c, *unit_disk(), 0.1);
  CHECK(r.outside_count == 0);
  CHECK(r.clause_a);
}

TEST_CASE("misscaled clouds fail one clause each") {
  auto gd = gaussian_disk();
  const std::size_t n = 20000;
  double s = std::sqrt(2.0 * std::log(double(n)));

  // half the right scale spreads points out to gauge ~2: mass escapes
  SampleCloud wide = make_cloud(*gd, n, 6, 0.5 * s);
  ConvergenceReport rw =
      convergence_report(wide, *unit_disk(), 0.15, 64, 3, 0.25);
  CHECK_FALSE(rw.clause_a);
  CHECK(double(rw.outside_count) > 0.02 * double(n));

  // twice the right scale squeezes everything well inside: the balls
  // around the boundary go empty
  SampleCloud tight = make_cloud(*gd, n, 6, 2.0 * s);
  ConvergenceReport rt =
      convergence_report(tight, *unit_disk(), 0.15, 64, 3, 0.25);
  CHECK(rt.clause_a);
  CHECK_FALSE(rt.clause_b);
  CHECK(rt.min_probe_hits() == 0);
}

TEST_CASE("concentration sharpens as the cloud grows") {
  auto gd = gaussian_disk();
  auto disk = unit_disk();
  std::vector<double> frac_med, hits_med;
  for (std::size_t n : {1000, 10000, 100000}) {
    std::vector<double> fracs, hits;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SampleCloud c =
          make_cloud(*gd, n, seed, std::sqrt(2.0 * std::log(double(n))));
      ConvergenceReport r = convergence_report(c, *disk, 0.02, 64, 3, 0.35);
      fracs.push_back(double(r.outside_count) / double(n));
      hits.push_back(double(r.min_probe_hits()));
    }
    frac_med.push_back(median(fracs));
    hits_med.push_back(median(hits));
  }
  CHECK(frac_med[0] >= frac_med[1]);
  CHECK(frac_med[1] >= frac_med[2]);
  CHECK(frac_med[0] > frac_med[2]);
  CHECK(hits_med[0] < hits_med[1]);
  CHECK(hits_med[1] < hits_med[2]);
}

TEST_CASE("convergence report rejects unusable inputs") {
  auto gd = gaussian_disk();
  SampleCloud c = make_cloud(*gd, 1000, 1);
  CHECK_THROWS_AS(convergence_report(c, *unit_disk(), 0.0),
                  std::invalid_argument);
  Ellipsoid ball3(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK_THROWS_AS(convergence_report(c, ball3, 0.1), std::invalid_argument);
}

TEST_CASE("edge keeps only the exposed quadrant extremes") {
  SampleCloud tri = manual_cloud({{1.0, 0.0}, {0.0, 1.0}, {0.4, 0.4}});
  std::vector<Vec> e = pareto_edge(tri, 0);
  REQUIRE(e.size() == 2);
  CHECK(e[0][0] == 1.0);
  CHECK(e[0][1] == 0.0);
  CHECK(e[1][0] == 0.0);
  CHECK(e[1][1] == 1.0);

  SampleCloud diag = manual_cloud({{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.9}});
  std::vector<Vec> d = pareto_edge(diag, 0);
  REQUIRE(d.size() == 1);
  CHECK(d[0][0] == 0.9);
  CHECK(d[0][1] == 0.9);

  SampleCloud q2 = manual_cloud(
      {{-1.0, -0.1}, {-0.5, -0.5}, {-0.1, -1.0}, {-0.3, -0.2}, {0.7, 0.7}});
  // (-0.5,-0.5) sits behind the chord between the two extremes, so it is
  // not exposed in any direction pointing into the quadrant
  std::vector<Vec> e2 = pareto_edge(q2, 2);
  REQUIRE(e2.size() == 2);
  CHECK(e2[0][0] == -1.0);
  CHECK(e2[0][1] == -0.1);
  CHECK(e2[1][0] == -0.1);
  CHECK(e2[1][1] == -1.0);

  CHECK_THROWS_AS(pareto_edge(tri, 4), std::invalid_argument);
  CHECK_THROWS_AS(pareto_edge(tri, -1), std::invalid_argument);
}

TEST_CASE("edge of the scaled gaussian cloud hugs the boundary from outside") {
  auto gd = gaussian_disk();
  const std::size_t n = 100000;
  double s = std::sqrt(2.0 * std::log(double(n)));
  std::vector<double> excess;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SampleCloud c = make_cloud(*gd, n, seed, s);
    double worst = 0.0;
    std::size_t sz = 0;
    for (int q = 0; q < 4; ++q)
      for (const Vec& p : pareto_edge(c, q)) {
        double g = std::sqrt(p[0] * p[0] + p[1] * p[1]);
        worst = std::max(worst, g - 1.0);
        ++sz;
      }
    excess.push_back(worst);
    CHECK(worst < 0.2);
    CHECK(sz >= 8);  // a handful of exposed points per quadrant
  }
  // distance from the edge set to the closed body, median over seeds
  CHECK(median(excess) <= 0.05);
}

TEST_CASE("coordinatewise maximum and its attainment flag") {
  SampleCloud split = manual_cloud({{1.0, 0.0}, {0.0, 1.0}});
  CoordMax m1 = coordinatewise_max(split);
  CHECK(m1.point[0] == 1.0);
  CHECK(m1.point[1] == 1.0);
  CHECK_FALSE(m1.is_sample_point);

  SampleCloud nested = manual_cloud({{1.0, 1.0}, {0.0, 0.0}});
  CoordMax m2 = coordinatewise_max(nested);
  CHECK(m2.point[0] == 1.0);
  CHECK(m2.point[1] == 1.0);
  CHECK(m2.is_sample_point);

  // flag coincides with "both coordinates peak at the same draw"
  UniformDisk den;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SampleCloud c = make_cloud(den, 100, seed, 1.0);
    std::size_t a0 = 0, a1 = 0;
    for (std::size_t i = 0; i < c.n(); ++i) {
      if (c.scaled.row(i)[0] > c.scaled.row(a0)[0]) a0 = i;
      if (c.scaled.row(i)[1] > c.scaled.row(a1)[1]) a1 = i;
    }
    CoordMax m = coordinatewise_max(c);
    CHECK(m.is_sample_point == (a0 == a1));
  }
}

TEST_CASE("maxima fit recovers the tail exponent") {
  auto pd1 = pareto_disk(1.0);
  FrechetFit f1 = frechet_fit(*pd1, 10000, 1000, 5);
  CHECK(f1.lambda_hat > 0.85);
  CHECK(f1.lambda_hat < 1.15);

  auto pd2 = pareto_disk(2.0);
  FrechetFit f2 = frechet_fit(*pd2, 10000, 1000, 5);
  CHECK(f2.lambda_hat > 1.7);
  CHECK(f2.lambda_hat < 2.3);

  for (const FrechetFit* f : {&f1, &f2}) {
    REQUIRE(f->a_hat.size() == 2);
    for (int j = 0; j < 2; ++j) {
      CHECK(f->a_hat[j] > 0.6);
      CHECK(f->a_hat[j] < 1.4);
      CHECK(f->residual_rms[j] < 0.3);
      CHECK(f->r_n[j] > 0.0);
      CHECK(f->lambda_by_coord[j] > 0.0);
    }
  }

  FrechetFit g1 = frechet_fit(*pd2, 2000, 600, 8, 1);
  FrechetFit g4 = frechet_fit(*pd2, 2000, 600, 8, 4);
  CHECK(g1.lambda_hat == g4.lambda_hat);
  CHECK(g1.a_hat[0] == g4.a_hat[0]);
}

TEST_CASE("maxima fit rejects unusable setups") {
  auto gd = gaussian_disk();
  CHECK_THROWS_AS(frechet_fit(*gd, 1000, 1000, 1), HeavyTailOnly);
  auto pd = pareto_disk(1.0);
  CHECK_THROWS_AS(frechet_fit(*pd, 1000, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(frechet_fit(*pd, 1000, 499, 1), std::invalid_argument);
  CHECK_THROWS_AS(frechet_fit(*pd, 5, 1000, 1), std::invalid_argument);
}

TEST_CASE("positive quadrant reach of star bodies") {
  CHECK(positivity_partition_check(*unit_disk()));
  PolytopeShape tri =
      PolytopeShape::from_vertices({{1, -1}, {-1, 1}, {-1, -1}});
  CHECK_FALSE(positivity_partition_check(tri));
  PolytopeShape corner =
      PolytopeShape::from_vertices({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(positivity_partition_check(corner));
  Ellipsoid ball3(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK_THROWS_AS(positivity_partition_check(ball3), std::invalid_argument);
  CHECK_THROWS_AS(positivity_partition_check(*unit_disk(), 0),
                  std::invalid_argument);
}
