#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "starshape/quadrature.hpp"

using namespace starshape;

TEST_CASE("adaptive simpson hits smooth integrals") {
  double s = integrate([](double x) { return std::sin(x); }, 0.0,
                       std::numbers::pi, 1e-12);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-11));
  double p = integrate([](double x) { return x * x; }, 0.0, 1.0, 1e-14);
  CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(integrate([](double x) { return x; }, 2.0, 2.0, 1e-12) == 0.0);
}

TEST_CASE("relative front end handles decaying integrands") {
  double expect = 1.0 - std::exp(-40.0) * 41.0;  // int_0^40 x e^-x dx
  double got = integrate_rel([](double x) { return x * std::exp(-x); }, 0.0,
                             40.0, 1e-10);
  CHECK(got == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("depth exhaustion reports instead of looping") {
  auto jump = [](double x) { return x < std::numbers::inv_sqrt3 ? 0.0 : 1.0; };
  CHECK_THROWS_AS(integrate(jump, 0.0, 1.0, 1e-13, 40), ToleranceNotReached);
}

TEST_CASE("bisection finds the bracketed root") {
  double r = bisect([](double x) { return std::cos(x); }, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(bisect([](double x) { return 1.0 + x * x; }, 0.0, 1.0, 1e-12),
                  NoRoot);
}

TEST_CASE("golden section minimizes a unimodal function") {
  double x = golden_min([](double t) { return (t - 0.7) * (t - 0.7); }, 0.0,
                        2.0, 1e-10);
  CHECK(x == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("nelder mead polishes a two dimensional minimum") {
  auto f = [](const std::vector<double>& v) {
    double dx = v[0] - 1.0, dy = v[1] + 0.5;
    return dx * dx + 2.0 * dy * dy;
  };
  auto best = nelder_mead(f, {0.0, 0.0}, 0.5, 1e-14, 600);
  CHECK(best[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(best[1] == doctest::Approx(-0.5).epsilon(1e-4));
}
