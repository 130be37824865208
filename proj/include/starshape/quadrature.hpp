// One-dimensional adaptive quadrature plus the small optimization and
// root-finding routines the geometry code leans on.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "starshape/errors.hpp"

namespace starshape {

namespace detail {

template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0) throw ToleranceNotReached("adaptive Simpson: depth exhausted");
  if (std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b]. tol is treated as an absolute tolerance for
// the whole interval; callers wanting relative accuracy scale it by a first
// rough estimate of the integral.
template <class F>
double integrate(const F& f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b);
  double m = 0.5 * (a + b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Relative-tolerance front end: one coarse pass fixes the scale, a second
// adaptive pass meets scale * rel_tol. The fallback floor keeps tiny
// integrals from demanding absurd absolute accuracy.
template <class F>
double integrate_rel(const F& f, double a, double b, double rel_tol,
                     double abs_floor = 1e-300) {
  if (a == b) return 0.0;
  double scale = 0.0;
  int coarse = 32;
  double h = (b - a) / coarse;
  for (int i = 0; i < coarse; ++i)
    scale += std::fabs(f(a + (i + 0.5) * h)) * std::fabs(h);
  double tol = scale * rel_tol;
  if (tol < abs_floor) tol = abs_floor;
  return integrate(f, a, b, tol);
}

// Bisection on a bracketing pair. Requires opposite signs at the ends.
template <class F>
double bisect(const F& f, double lo, double hi, double x_tol,
              int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw NoRoot("bisect: endpoints do not bracket a sign change");
  for (int i = 0; i < max_iter; ++i) {
    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= x_tol * (1.0 + std::fabs(lo) + std::fabs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimization of a unimodal function on [a, b].
template <class F>
double golden_min(const F& f, double a, double b, double x_tol,
                  int max_iter = 200) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > x_tol; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Plain Nelder-Mead for a handful of dimensions. Used to polish grid
// optima where no angle parameterization is convenient. Deterministic:
// no randomness, fixed shrink/reflect coefficients.
inline std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, double step, double f_tol, int max_iter = 400) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

  auto order = [&]() {
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i; j > 0 && fv[j] < fv[j - 1]; --j) {
        std::swap(fv[j], fv[j - 1]);
        std::swap(simplex[j], simplex[j - 1]);
      }
  };
  order();

  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fv[n] - fv[0]) <= f_tol * (1.0 + std::fabs(fv[0]))) break;
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;
    auto blend = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j)
        p[j] = centroid[j] + t * (simplex[n][j] - centroid[j]);
      return p;
    };
    auto xr = blend(-1.0);
    double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = blend(-2.0);
      double fe = f(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
    } else {
      auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
      double fc = f(xc);
      if (fc < std::min(fr, fv[n])) {
        simplex[n] = xc;
        fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = 0; j < n; ++j)
            simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
          fv[i] = f(simplex[i]);
        }
      }
    }
    order();
  }
  return simplex[0];
}

}  // namespace starshape
