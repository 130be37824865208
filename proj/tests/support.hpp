// Statistical helpers shared by the unit and acceptance binaries.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "starshape/density.hpp"
#include "starshape/rng.hpp"
#include "starshape/special.hpp"
#include "starshape/vec.hpp"

namespace testsupport {

using namespace starshape;

// One-sample two-sided KS p-value of data against a continuous CDF.
inline double ks_p_value(std::vector<double> data,
                         const std::function<double(double)>& cdf) {
  std::sort(data.begin(), data.end());
  const std::size_t n = data.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = cdf(data[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return kolmogorov_p_value(d, n);
}

inline double chi2_upper_p(double stat, int dof) {
  return 1.0 - chi_square_cdf(stat, dof);
}

// Pearson chi-square p-value of observed counts against expected ones.
// Thin cells (expected < 5) are pooled into one bucket.
inline double counts_chi2_p(const std::vector<double>& observed,
                            const std::vector<double>& expected) {
  double stat = 0.0;
  int used = 0;
  double pool_o = 0.0, pool_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] >= 5.0) {
      double d = observed[i] - expected[i];
      stat += d * d / expected[i];
      ++used;
    } else {
      pool_o += observed[i];
      pool_e += expected[i];
    }
  }
  if (pool_e >= 5.0) {
    double d = pool_o - pool_e;
    stat += d * d / pool_e;
    ++used;
  }
  if (used < 2) return 1.0;
  return chi2_upper_p(stat, used - 1);
}

// 2-D histogram goodness of fit: bin the sample on an nx x ny grid over
// `window`, estimate each cell's probability mass by uniform MC over the
// cell (mc_per_cell pdf draws), pool everything outside the window into
// a rest bucket, and return the chi-square p-value.
inline double hist2d_chi2_p(const Density& den, const Matrix& pts,
                            const Box& window, int nx, int ny,
                            std::size_t mc_per_cell, std::uint64_t seed) {
  const std::size_t n = pts.rows();
  std::vector<double> observed(static_cast<std::size_t>(nx) * ny + 1, 0.0);
  const double wx = window.width(0) / nx, wy = window.width(1) / ny;
  for (std::size_t i = 0; i < n; ++i) {
    double x = pts.row(i)[0], y = pts.row(i)[1];
    int cx = static_cast<int>(std::floor((x - window.lo[0]) / wx));
    int cy = static_cast<int>(std::floor((y - window.lo[1]) / wy));
    if (cx < 0 || cx >= nx || cy < 0 || cy >= ny)
      observed.back() += 1.0;
    else
      observed[static_cast<std::size_t>(cy) * nx + cx] += 1.0;
  }
  std::vector<double> expected(observed.size(), 0.0);
  double covered = 0.0;
  Vec p(2);
  for (int cy = 0; cy < ny; ++cy)
    for (int cx = 0; cx < nx; ++cx) {
      Rng rng(seed, static_cast<std::uint64_t>(cy) * nx + cx);
      double lox = window.lo[0] + cx * wx, loy = window.lo[1] + cy * wy;
      // jittered grid: one uniform point per subcell. The stratification
      // shrinks the quadrature noise far below the sampling noise of the
      // observed counts, which a plain per-cell MC average cannot do.
      const std::size_t g = static_cast<std::size_t>(
          std::max(4.0, std::round(std::sqrt(double(mc_per_cell)))));
      double s = 0.0;
      for (std::size_t jx = 0; jx < g; ++jx)
        for (std::size_t jy = 0; jy < g; ++jy) {
          p[0] = lox + (jx + rng.uniform01()) * wx / g;
          p[1] = loy + (jy + rng.uniform01()) * wy / g;
          s += den.pdf(p);
        }
      double mass = s / double(g * g) * wx * wy;
      expected[static_cast<std::size_t>(cy) * nx + cx] = mass * n;
      covered += mass;
    }
  expected.back() = std::max(0.0, 1.0 - covered) * n;
  return counts_chi2_p(observed, expected);
}

// Kendall rank correlation of two columns (quadratic scan; subsample
// before calling on big inputs).
inline double kendall_tau(const std::vector<double>& a,
                          const std::vector<double>& b) {
  const std::size_t n = a.size();
  long long con = 0, dis = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = (a[i] - a[j]) * (b[i] - b[j]);
      if (s > 0.0)
        ++con;
      else if (s < 0.0)
        ++dis;
    }
  return static_cast<double>(con - dis) /
         (0.5 * static_cast<double>(n) * (n - 1));
}

}  // namespace testsupport
