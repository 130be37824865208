#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "starshape/density.hpp"
#include "starshape/errors.hpp"
#include "starshape/special.hpp"
#include "starshape/vec.hpp"

// Empirical tail-(in)dependence diagnostics: the conditional exceedance
// curve lambda_hat(q), the normalized joint-sum exceedance s_hat(n), record
// and top-k overlap probabilities of simulated clouds, and a composite
// verdict. Everything that can work on ranks does: the quantities are
// copula properties, so rank transforms remove marginal error entirely.

namespace starshape {

namespace detail {

// ordinal ranks 1..n; ties broken by input order (first occurrence gets
// the smaller rank), which only matters for inputs with repeated values
inline std::vector<std::uint32_t> ordinal_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::uint32_t> idx(n), rank(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
  for (std::size_t i = 0; i < n; ++i) rank[idx[i]] = static_cast<std::uint32_t>(i + 1);
  return rank;
}

inline std::vector<double> matrix_column(const Matrix& m, int c) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m.row(i)[c];
  return out;
}

}  // namespace detail

// lambda_hat(q) = P_hat{rank1 > qN | rank2 > qN} over a grid of levels,
// with Wilson 95% intervals from the conditioning counts.
struct SibuyaCurve {
  std::vector<double> q_grid;
  std::vector<double> lambda_hat;
  std::vector<Interval> ci;
  std::vector<std::size_t> n_effective;
};

inline SibuyaCurve lambda_u_curve(const Matrix& pts,
                                  const std::vector<double>& q_grid) {
  if (pts.cols() != 2)
    throw std::invalid_argument("lambda_u_curve: needs a bivariate sample");
  const std::size_t n = pts.rows();
  if (n < 1000)
    throw InsufficientSample("lambda_u_curve: needs at least 1e3 points");
  if (q_grid.empty())
    throw std::invalid_argument("lambda_u_curve: empty quantile grid");
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    if (!(q_grid[i] > 0.0) || !(q_grid[i] < 1.0))
      throw std::invalid_argument("lambda_u_curve: levels must lie in (0,1)");
    if (i > 0 && !(q_grid[i] > q_grid[i - 1]))
      throw std::invalid_argument("lambda_u_curve: levels must increase");
  }
  if ((1.0 - q_grid.back()) * static_cast<double>(n) < 20.0)
    throw InsufficientTail("lambda_u_curve: fewer than 20 tail points at the top level");

  std::vector<std::uint32_t> r1 =
      detail::ordinal_ranks(detail::matrix_column(pts, 0));
  std::vector<std::uint32_t> r2 =
      detail::ordinal_ranks(detail::matrix_column(pts, 1));
  SibuyaCurve out;
  out.q_grid = q_grid;
  for (double q : q_grid) {
    double thr = q * static_cast<double>(n);
    std::size_t both = 0, cond = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (r2[i] > thr) {
        ++cond;
        if (r1[i] > thr) ++both;
      }
    }
    out.lambda_hat.push_back(cond > 0 ? double(both) / double(cond) : 0.0);
    out.ci.push_back(wilson_interval(double(both), double(cond), kZ95));
    out.n_effective.push_back(cond);
  }
  return out;
}

// s_hat(n) = n * P_hat{X1 + X2 > t1n + t2n} with t_in the empirical
// (1 - 1/n)-quantiles of the marginals, all from one big sample. A limit
// of zero along n is the summed-exceedance route to asymptotic
// independence; heavy-tailed dependence keeps it bounded away from zero.
struct SumCriterion {
  std::vector<std::size_t> n_list;
  std::vector<double> s_hat;
  std::vector<double> t1, t2;  // marginal quantiles actually used
};

inline SumCriterion sum_criterion(const Density& den,
                                  const std::vector<std::size_t>& n_list,
                                  std::size_t n_big, std::uint64_t seed,
                                  int n_threads = 0) {
  if (den.dim() != 2)
    throw std::invalid_argument("sum_criterion: needs a bivariate density");
  if (n_list.empty())
    throw std::invalid_argument("sum_criterion: empty n list");
  for (std::size_t n : n_list) {
    if (n < 2) throw std::invalid_argument("sum_criterion: n must be >= 2");
    if (n > n_big / 100)
      throw InsufficientSample("sum_criterion: need n <= N/100 for stable quantiles");
  }
  Matrix pts = den.sample(n_big, seed, n_threads);
  std::vector<double> c1 = detail::matrix_column(pts, 0);
  std::vector<double> c2 = detail::matrix_column(pts, 1);
  std::vector<double> s1 = c1, s2 = c2;
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  SumCriterion out;
  out.n_list = n_list;
  for (std::size_t n : n_list) {
    std::size_t idx = static_cast<std::size_t>(
        std::floor((1.0 - 1.0 / double(n)) * double(n_big)));
    idx = std::min(idx, n_big - 1);
    double t1 = s1[idx], t2 = s2[idx];
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_big; ++i)
      if (c1[i] + c2[i] > t1 + t2) ++count;
    out.t1.push_back(t1);
    out.t2.push_back(t2);
    out.s_hat.push_back(double(n) * double(count) / double(n_big));
  }
  return out;
}

// Fraction of simulated n-clouds whose coordinatewise maximum is itself a
// sample point, i.e. both coordinates peak at the same draw. Tends to 0
// under asymptotic independence, stays positive under dependence.
struct RecordEstimate {
  std::size_t n = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  Interval ci{0.0, 1.0};
};

inline RecordEstimate record_probability(const Density& den, std::size_t n,
                                         std::size_t trials,
                                         std::uint64_t seed,
                                         int n_threads = 0) {
  if (den.dim() != 2)
    throw std::invalid_argument("record_probability: needs a bivariate density");
  if (n < 2)
    throw std::invalid_argument("record_probability: cloud size must be >= 2");
  if (trials < 1000)
    throw std::invalid_argument("record_probability: needs at least 1e3 trials");
  std::vector<unsigned char> hit(trials, 0);
  int threads = n_threads > 0 ? n_threads : default_threads();
  parallel_blocks(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    Vec x(2);
    double m1 = -kInf, m2 = -kInf;
    std::size_t a1 = 0, a2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      den.draw(rng, x);
      if (x[0] > m1) {
        m1 = x[0];
        a1 = i;
      }
      if (x[1] > m2) {
        m2 = x[1];
        a2 = i;
      }
    }
    hit[t] = a1 == a2 ? 1 : 0;
  });
  std::size_t k = 0;
  for (unsigned char h : hit) k += h;
  RecordEstimate out;
  out.n = n;
  out.trials = trials;
  out.p_hat = double(k) / double(trials);
  out.ci = wilson_interval(double(k), double(trials), kZ95);
  return out;
}

// P_hat{the top-k index sets of the two coordinates intersect} over
// simulated n-clouds.
struct OverlapEstimate {
  std::size_t n = 0, k = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  Interval ci{0.0, 1.0};
};

// closed form under independent coordinates: the two top-k sets are
// independent uniform k-subsets, so P{disjoint} is a falling-factorial
// ratio
inline double independent_overlap(std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("independent_overlap: k must be <= n");
  double p_disjoint = 1.0;
  for (std::size_t i = 0; i < k; ++i)
    p_disjoint *= double(n - k - i) / double(n - i);
  return 1.0 - p_disjoint;
}

inline OverlapEstimate overlap_probability(const Density& den, std::size_t n,
                                           std::size_t k, std::size_t trials,
                                           std::uint64_t seed,
                                           int n_threads = 0) {
  if (den.dim() != 2)
    throw std::invalid_argument("overlap_probability: needs a bivariate density");
  if (k == 0 || k > n)
    throw std::invalid_argument("overlap_probability: need 1 <= k <= n");
  if (trials < 1000)
    throw std::invalid_argument("overlap_probability: needs at least 1e3 trials");
  std::vector<unsigned char> hit(trials, 0);
  int threads = n_threads > 0 ? n_threads : default_threads();
  parallel_blocks(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    Vec x(2);
    std::vector<double> c1(n), c2(n);
    for (std::size_t i = 0; i < n; ++i) {
      den.draw(rng, x);
      c1[i] = x[0];
      c2[i] = x[1];
    }
    auto top_k = [&](const std::vector<double>& c) {
      std::vector<std::uint32_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return c[a] > c[b]; });
      std::vector<std::uint32_t> top(idx.begin(), idx.begin() + k);
      std::sort(top.begin(), top.end());
      return top;
    };
    std::vector<std::uint32_t> t1 = top_k(c1), t2 = top_k(c2);
    std::vector<std::uint32_t> inter;
    std::set_intersection(t1.begin(), t1.end(), t2.begin(), t2.end(),
                          std::back_inserter(inter));
    hit[t] = inter.empty() ? 0 : 1;
  });
  std::size_t hits = 0;
  for (unsigned char h : hit) hits += h;
  OverlapEstimate out;
  out.n = n;
  out.k = k;
  out.trials = trials;
  out.p_hat = double(hits) / double(trials);
  out.ci = wilson_interval(double(hits), double(trials), kZ95);
  return out;
}

// Composite call on the evidence. Thresholds are ours, not a law: defaults
// below, overridable by the caller.
enum class VerdictTag { AsympIndependent, AsympDependent, Inconclusive };

struct VerdictThresholds {
  double lambda_small = 0.05;   // top-level lambda_hat below this ...
  double ci_width = 0.05;       // ... with a CI at most this wide
  double lambda_lower = 0.1;    // CI lower bounds above this at the top two levels
  double record_halving = 0.5;  // p_hat(max n) below this times p_hat(min n)
};

struct Verdict {
  VerdictTag tag = VerdictTag::Inconclusive;
  VerdictThresholds thresholds;
  // the summary numbers the rule actually looked at (NaN when absent)
  double lambda_top = std::numeric_limits<double>::quiet_NaN();
  double lambda_top_ci_width = std::numeric_limits<double>::quiet_NaN();
  double lambda_ci_lower_top2 = std::numeric_limits<double>::quiet_NaN();
  double record_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline Verdict dependence_verdict(const SibuyaCurve& curve,
                                  const std::vector<RecordEstimate>& records,
                                  const SumCriterion& sums = {},
                                  const VerdictThresholds& th = {}) {
  (void)sums;  // reported by callers; the rule rests on the curve and records
  Verdict v;
  v.thresholds = th;
  bool top_small = false, dep = false;
  if (!curve.lambda_hat.empty()) {
    std::size_t m = curve.lambda_hat.size();
    v.lambda_top = curve.lambda_hat[m - 1];
    v.lambda_top_ci_width = curve.ci[m - 1].hi - curve.ci[m - 1].lo;
    top_small = v.lambda_top < th.lambda_small &&
                v.lambda_top_ci_width < th.ci_width;
    if (m >= 2) {
      v.lambda_ci_lower_top2 =
          std::min(curve.ci[m - 1].lo, curve.ci[m - 2].lo);
      dep = v.lambda_ci_lower_top2 > th.lambda_lower;
    }
  }
  bool halving = false;
  if (records.size() >= 2) {
    const RecordEstimate* lo = &records.front();
    const RecordEstimate* hi = &records.front();
    for (const RecordEstimate& r : records) {
      if (r.n < lo->n) lo = &r;
      if (r.n > hi->n) hi = &r;
    }
    if (lo->p_hat > 0.0) {
      v.record_ratio = hi->p_hat / lo->p_hat;
      halving = v.record_ratio < th.record_halving;
    }
  }
  if (top_small && halving)
    v.tag = VerdictTag::AsympIndependent;
  else if (dep)
    v.tag = VerdictTag::AsympDependent;
  else
    v.tag = VerdictTag::Inconclusive;
  return v;
}

}  // namespace starshape
