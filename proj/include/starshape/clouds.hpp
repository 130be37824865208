#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "starshape/density.hpp"
#include "starshape/errors.hpp"
#include "starshape/generators.hpp"
#include "starshape/shapes.hpp"
#include "starshape/special.hpp"

// Scaled sample clouds. Dividing an n-point sample by the light-tail scale
// s_n (the largest root of n s^d f0(s) = 1) concentrates it onto the unit
// level set D: no mass escapes any inflated copy of D, and every boundary
// neighborhood keeps collecting points. This module builds such clouds,
// checks both clauses at finite n, extracts the edge points and the
// coordinatewise maximum for plotting, and fits the limit law of scaled
// maxima in the heavy-tailed regime, where the right scale is a marginal
// quantile instead.

namespace starshape {

struct SampleCloud {
  Matrix raw;
  double s_n = 1.0;
  Matrix scaled;  // scaled.row(i) = raw.row(i) / s_n, entry by entry
  std::string label;
  std::uint64_t seed = 0;

  std::size_t n() const { return raw.rows(); }
  int dim() const { return raw.cols(); }
};

// s_n override <= 0 means "solve for it"; heavy-tailed profiles have no
// such scale and require an explicit override.
inline SampleCloud make_cloud(const Density& den, std::size_t n,
                              std::uint64_t seed, double s_n_override = 0.0,
                              int n_threads = 0) {
  SampleCloud cloud;
  if (s_n_override > 0.0) {
    cloud.s_n = s_n_override;
  } else {
    const auto* hom = dynamic_cast<const HomotheticDensity*>(&den);
    if (hom == nullptr)
      throw HeavyTailUnsupported(
          "make_cloud: no closed scale for this density; pass s_n explicitly");
    cloud.s_n = scaling_constant(hom->shape(), hom->generator(),
                                 hom->c_norm(), n);
  }
  cloud.raw = den.sample(n, seed, n_threads);
  cloud.scaled = Matrix(n, den.dim());
  Vec x(den.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = cloud.raw.row(i);
    for (int j = 0; j < den.dim(); ++j) x[j] = p[j] / cloud.s_n;
    cloud.scaled.set_point(i, x);
  }
  cloud.label = den.label();
  cloud.seed = seed;
  return cloud;
}

// Finite-n check of the two concentration clauses. A: at most a tolerated
// fraction of scaled points has gauge above e^eps. B: around each of
// n_probes boundary points, the ball of probe_radius holds at least m_min
// scaled points. Raw counts are reported alongside the verdicts; the
// verdicts are finite-n surrogates for a limit statement, nothing more.
struct ConvergenceReport {
  double eps = 0.0;
  double probe_radius = 0.0;
  std::size_t m_min = 0;
  double outside_tol = 0.0;
  std::size_t n = 0;
  std::size_t outside_count = 0;
  std::vector<std::size_t> probe_hits;
  Matrix probes;
  bool clause_a = false;
  bool clause_b = false;

  std::size_t min_probe_hits() const {
    std::size_t m = static_cast<std::size_t>(-1);
    for (std::size_t h : probe_hits) m = std::min(m, h);
    return probe_hits.empty() ? 0 : m;
  }
};

namespace detail {

// Deterministic direction grid: equal angles in the plane, a Kronecker
// sequence pushed through the normal quantile elsewhere.
inline std::vector<Vec> probe_directions(int dim, std::size_t count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (dim == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      double a = 2.0 * std::numbers::pi * (double(k) + 0.5) / double(count);
      dirs.push_back(Vec{std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  // root of x^{d+1} = x + 1; its inverse powers fill the unit cube evenly
  double phi = 1.5;
  for (int it = 0; it < 128; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  std::vector<double> alpha(dim);
  double a = 1.0;
  for (int j = 0; j < dim; ++j) {
    a /= phi;
    alpha[j] = a;
  }
  for (std::size_t k = 0; k < count; ++k) {
    Vec u(dim);
    double norm2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      double frac = std::fmod((double(k) + 0.5) * alpha[j], 1.0);
      u[j] = norm_quantile(std::min(std::max(frac, 1e-12), 1.0 - 1e-12));
      norm2 += u[j] * u[j];
    }
    if (norm2 > 0.0) {
      for (int j = 0; j < dim; ++j) u[j] /= std::sqrt(norm2);
      dirs.push_back(u);
    }
  }
  return dirs;
}

}  // namespace detail

inline ConvergenceReport convergence_report(const SampleCloud& cloud,
                                            const StarShape& shape,
                                            double eps,
                                            std::size_t n_probes = 0,
                                            std::size_t m_min = 3,
                                            double probe_radius = 0.0,
                                            double outside_tol = 0.01) {
  if (!(eps > 0.0))
    throw std::invalid_argument("convergence_report: eps must be positive");
  if (shape.dim() != cloud.dim())
    throw std::invalid_argument("convergence_report: dimension mismatch");
  const int d = cloud.dim();
  if (n_probes == 0) n_probes = d == 2 ? 64 : 512;
  if (!(probe_radius > 0.0)) probe_radius = eps;

  ConvergenceReport rep;
  rep.eps = eps;
  rep.probe_radius = probe_radius;
  rep.m_min = m_min;
  rep.outside_tol = outside_tol;
  rep.n = cloud.n();

  std::vector<Vec> probes;
  for (const Vec& u : detail::probe_directions(d, n_probes)) {
    double g = shape.gauge(u);
    if (std::isfinite(g) && g > 0.0) probes.push_back(u / g);
  }
  if (probes.empty())
    throw NumericError("convergence_report: no usable probe directions");

  double cutoff = std::exp(eps);
  rep.probe_hits.assign(probes.size(), 0);
  Vec x(d);
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    const double* p = cloud.scaled.row(i);
    for (int j = 0; j < d; ++j) x[j] = p[j];
    if (shape.gauge(x) > cutoff) ++rep.outside_count;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      double dist2 = 0.0;
      for (int j = 0; j < d; ++j) {
        double t = p[j] - probes[k][j];
        dist2 += t * t;
      }
      if (dist2 <= probe_radius * probe_radius) ++rep.probe_hits[k];
    }
  }
  rep.probes = Matrix(probes.size(), d);
  for (std::size_t k = 0; k < probes.size(); ++k)
    rep.probes.set_point(k, probes[k]);
  rep.clause_a =
      double(rep.outside_count) <= outside_tol * double(cloud.n());
  rep.clause_b = rep.min_probe_hits() >= m_min;
  return rep;
}

// Edge points of one quadrant: the scaled points that maximize u . x over
// the quadrant's members for some direction u with both components
// strictly of the quadrant's sign. Those are the outward convex-chain
// vertices between the extreme-x and extreme-y points; merely undominated
// points that hide behind that chain (reachable by no supporting
// direction) stay out, which matches what "the edge of the cloud" shows
// in a scatter plot. Sorted by angle.
inline std::vector<Vec> pareto_edge(const SampleCloud& cloud, int quadrant) {
  if (cloud.dim() != 2)
    throw std::invalid_argument("pareto_edge: needs a planar cloud");
  if (quadrant < 0 || quadrant > 3)
    throw std::invalid_argument("pareto_edge: quadrant must be 0..3");
  double sx = (quadrant == 0 || quadrant == 3) ? 1.0 : -1.0;
  double sy = quadrant <= 1 ? 1.0 : -1.0;

  using P = std::pair<double, double>;
  std::vector<P> cand;  // sign-adjusted coordinates, both >= 0
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    const double* p = cloud.scaled.row(i);
    double a = sx * p[0], b = sy * p[1];
    if (a >= 0.0 && b >= 0.0) cand.emplace_back(a, b);
  }
  if (cand.empty()) return {};
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  if (cand.size() == 1)
    return {Vec{sx * cand[0].first, sy * cand[0].second}};

  auto cross = [](const P& o, const P& a, const P& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  // monotone chain, counterclockwise, collinear interiors dropped
  std::vector<P> hull;
  for (const P& p : cand) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), p) <= 0.0)
      hull.pop_back();
    hull.push_back(p);
  }
  std::size_t lower = hull.size() + 1;
  for (auto it = cand.rbegin() + 1; it != cand.rend(); ++it) {
    while (hull.size() >= lower &&
           cross(hull[hull.size() - 2], hull.back(), *it) <= 0.0)
      hull.pop_back();
    hull.push_back(*it);
  }
  hull.pop_back();  // first point repeated

  auto lex_ab = [](const P& l, const P& r) { return l < r; };
  auto lex_ba = [](const P& l, const P& r) {
    return l.second != r.second ? l.second < r.second : l.first < r.first;
  };
  std::size_t ix = 0, iy = 0;
  for (std::size_t k = 1; k < hull.size(); ++k) {
    if (lex_ab(hull[ix], hull[k])) ix = k;
    if (lex_ba(hull[iy], hull[k])) iy = k;
  }
  std::vector<Vec> edge;
  for (std::size_t k = ix;; k = (k + 1) % hull.size()) {
    edge.push_back(Vec{sx * hull[k].first, sy * hull[k].second});
    if (k == iy) break;
  }
  std::sort(edge.begin(), edge.end(), [](const Vec& l, const Vec& r) {
    return std::atan2(l[1], l[0]) < std::atan2(r[1], r[0]);
  });
  return edge;
}

// Componentwise maximum of the scaled cloud; the flag says whether one
// single point attains every coordinate of it.
struct CoordMax {
  Vec point;
  bool is_sample_point = false;
};

inline CoordMax coordinatewise_max(const SampleCloud& cloud) {
  if (cloud.n() == 0)
    throw std::invalid_argument("coordinatewise_max: empty cloud");
  const int d = cloud.dim();
  CoordMax out{Vec(d, -kInf), false};
  for (std::size_t i = 0; i < cloud.n(); ++i) {
    const double* p = cloud.scaled.row(i);
    for (int j = 0; j < d; ++j) out.point[j] = std::max(out.point[j], p[j]);
  }
  for (std::size_t i = 0; i < cloud.n() && !out.is_sample_point; ++i) {
    const double* p = cloud.scaled.row(i);
    bool all = true;
    for (int j = 0; j < d; ++j) all = all && p[j] == out.point[j];
    out.is_sample_point = all;
  }
  return out;
}

// Fit of the heavy-tail limit of scaled coordinatewise maxima. Per trial,
// the max of an n-cloud is divided componentwise by the empirical
// (1 - 1/n) marginal quantile r_n (taken from a separate calibration
// sample; the two scales differ by an asymptotically constant factor,
// which the tail exponent cannot see). The exponent comes from regressing
// log(-log F_hat) on log t over the upper half of the maxima sample,
// where the survival law is (a/t)^lambda to first order.
struct FrechetFit {
  double lambda_hat = 0.0;
  std::vector<double> a_hat;
  std::vector<double> lambda_by_coord;
  std::vector<double> residual_rms;
  std::vector<double> r_n;  // calibration scales actually used
};

inline FrechetFit frechet_fit(const HomotheticDensity& den, std::size_t n,
                              std::size_t trials, std::uint64_t seed,
                              int n_threads = 0) {
  if (den.generator().rapid())
    throw HeavyTailOnly("frechet_fit: needs a regularly varying profile");
  if (trials < 500)
    throw std::invalid_argument("frechet_fit: needs at least 500 trials");
  if (n < 10)
    throw std::invalid_argument("frechet_fit: cloud size must be >= 10");
  const int d = den.dim();

  std::size_t n_cal = std::max<std::size_t>(100000, 50 * n);
  Matrix cal = den.sample(n_cal, derive_seed(seed, 0xCA1ull), n_threads);
  std::vector<double> r_n(d);
  {
    std::size_t idx = static_cast<std::size_t>(
        std::floor((1.0 - 1.0 / double(n)) * double(n_cal)));
    idx = std::min(idx, n_cal - 1);
    std::vector<double> col(n_cal);
    for (int j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < n_cal; ++i) col[i] = cal.row(i)[j];
      std::nth_element(col.begin(), col.begin() + idx, col.end());
      r_n[j] = col[idx];
      if (!(r_n[j] > 0.0))
        throw NumericError("frechet_fit: nonpositive calibration quantile");
    }
  }

  Matrix maxima(trials, d);
  std::uint64_t trial_seed = derive_seed(seed, 0xF17ull);
  int threads = n_threads > 0 ? n_threads : default_threads();
  parallel_blocks(trials, threads, [&](std::size_t t) {
    Rng rng(trial_seed, t);
    Vec x(d), m(d, -kInf);
    for (std::size_t i = 0; i < n; ++i) {
      den.draw(rng, x);
      for (int j = 0; j < d; ++j) m[j] = std::max(m[j], x[j]);
    }
    for (int j = 0; j < d; ++j) m[j] /= r_n[j];
    maxima.set_point(t, m);
  });

  FrechetFit fit;
  fit.r_n = r_n;
  std::vector<double> w(trials);
  for (int j = 0; j < d; ++j) {
    for (std::size_t t = 0; t < trials; ++t) w[t] = maxima.row(t)[j];
    std::sort(w.begin(), w.end());
    std::vector<double> xs, ys;
    for (std::size_t i = trials / 2; i < trials; ++i) {
      if (!(w[i] > 0.0)) continue;
      double f = (double(i) + 0.5) / double(trials);
      xs.push_back(std::log(w[i]));
      ys.push_back(std::log(-std::log(f)));
    }
    if (xs.size() < 16)
      throw NumericError("frechet_fit: too few positive maxima to regress");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw NumericError("frechet_fit: degenerate regressor");
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double lambda = -slope;
    if (!(lambda > 0.0))
      throw NumericError("frechet_fit: nonpositive tail exponent");
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double e = ys[i] - (intercept + slope * xs[i]);
      rss += e * e;
    }
    fit.lambda_by_coord.push_back(lambda);
    fit.a_hat.push_back(std::exp(intercept / lambda));
    fit.residual_rms.push_back(std::sqrt(rss / double(xs.size())));
  }
  double sum = 0.0;
  for (double l : fit.lambda_by_coord) sum += l;
  fit.lambda_hat = sum / double(d);
  return fit;
}

// True iff the body reaches into the open positive quadrant. A star body
// contains a point with both coordinates positive exactly when its gauge
// is finite along some direction strictly inside that quadrant, so a
// quarter-arc scan suffices. Heavy-tailed maxima keep both coordinates
// coupled exactly in this case.
inline bool positivity_partition_check(const StarShape& shape,
                                       std::size_t n_dirs = 4096) {
  if (shape.dim() != 2)
    throw std::invalid_argument("positivity_partition_check: needs dim 2");
  if (n_dirs == 0)
    throw std::invalid_argument("positivity_partition_check: empty grid");
  for (std::size_t k = 0; k < n_dirs; ++k) {
    double a = 0.5 * std::numbers::pi * (double(k) + 0.5) / double(n_dirs);
    double g = shape.gauge(Vec{std::cos(a), std::sin(a)});
    if (std::isfinite(g) && g > 0.0) return true;
  }
  return false;
}

}  // namespace starshape
