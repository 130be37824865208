// Bounded open star-shaped sets D, represented by their gauge functions.
// The gauge is 1-homogeneous, positive away from the origin, and +infinity
// outside the cone spanned by D when the origin sits on the boundary.
// Geometric queries used by the dependence diagnostics live here too:
// boundary points, coordinatewise extrema, bivariate projection gauges,
// bluntness verdicts, and hit-or-miss volume.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starshape/errors.hpp"
#include "starshape/quadrature.hpp"
#include "starshape/rng.hpp"
#include "starshape/vec.hpp"

namespace starshape {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class StarShape {
 public:
  virtual ~StarShape() = default;

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const Box& bounding_box() const { return box_; }

  // 1-homogeneous; 0 only at the origin; +infinity outside the cone.
  virtual double gauge(const Vec& x) const = 0;

  // Shapes with closed-form coordinatewise extrema fill (a, b) and return
  // true; the numeric scan is the fallback and the cross-check.
  virtual bool analytic_extrema(Vec& a, Vec& b) const {
    (void)a;
    (void)b;
    return false;
  }

  virtual std::optional<double> analytic_volume() const { return std::nullopt; }

  // Whether D is convex; only the convexity property test consumes this.
  virtual bool convex() const = 0;

 protected:
  StarShape(int dim, std::string label) : dim_(dim), label_(std::move(label)) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("StarShape: dimension out of range");
  }
  void set_box(const Box& box) { box_ = box; }

 private:
  int dim_;
  std::string label_;
  Box box_;
};

using ShapePtr = std::shared_ptr<const StarShape>;

// ---------------------------------------------------------------------------
// Concrete shapes

class Ellipsoid : public StarShape {
 public:
  Ellipsoid(int dim, const std::vector<double>& sigma_row_major)
      : StarShape(dim, "ellipsoid(d=" + std::to_string(dim) + ")"),
        sigma_(dim, sigma_row_major) {
    Vec lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      hi[i] = std::sqrt(sigma_(i, i));
      lo[i] = -hi[i];
    }
    set_box(Box{lo, hi});
  }

  double gauge(const Vec& x) const override {
    return std::sqrt(sigma_.quadratic_form_inv(x));
  }

  bool analytic_extrema(Vec& a, Vec& b) const override {
    a = bounding_box().lo;
    b = bounding_box().hi;
    return true;
  }

  std::optional<double> analytic_volume() const override {
    return unit_ball_volume(dim()) * std::sqrt(sigma_.det());
  }

  bool convex() const override { return true; }

  const SmallSpd& sigma() const { return sigma_; }

  static double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  }

 private:
  SmallSpd sigma_;
};

class LpBall : public StarShape {
 public:
  LpBall(double p, int dim)
      : StarShape(dim, p == kInf ? "lp(p=inf,d=" + std::to_string(dim) + ")"
                                 : "lp(p=" + std::to_string(p) + ",d=" +
                                       std::to_string(dim) + ")"),
        p_(p) {
    if (!(p >= 1.0)) throw std::invalid_argument("LpBall: p must be >= 1");
    Vec lo(dim, -1.0), hi(dim, 1.0);
    set_box(Box{lo, hi});
  }

  double gauge(const Vec& x) const override {
    if (p_ == kInf) return norm_inf(x);
    if (p_ == 1.0) {
      double s = 0.0;
      for (int i = 0; i < dim(); ++i) s += std::fabs(x[i]);
      return s;
    }
    if (p_ == 2.0) return norm2(x);
    double s = 0.0;
    for (int i = 0; i < dim(); ++i) s += std::pow(std::fabs(x[i]), p_);
    return std::pow(s, 1.0 / p_);
  }

  bool analytic_extrema(Vec& a, Vec& b) const override {
    a = Vec(dim(), -1.0);
    b = Vec(dim(), 1.0);
    return true;
  }

  std::optional<double> analytic_volume() const override {
    if (p_ == kInf) return std::pow(2.0, dim());
    double lg = dim() * (std::log(2.0) + std::lgamma(1.0 / p_ + 1.0)) -
                std::lgamma(dim() / p_ + 1.0);
    return std::exp(lg);
  }

  bool convex() const override { return true; }

  double p() const { return p_; }

 private:
  double p_;
};

// Euclidean ball through which the origin is strictly interior: center beta,
// radius sqrt(1 + |beta|^2). The gauge solves |x/g - beta| = radius for g.
class OffCenterBall : public StarShape {
 public:
  explicit OffCenterBall(const Vec& beta)
      : StarShape(beta.size(), "offcenter(d=" + std::to_string(beta.size()) + ")"),
        beta_(beta),
        radius_(std::sqrt(1.0 + dot(beta, beta))) {
    Vec lo(dim()), hi(dim());
    for (int i = 0; i < dim(); ++i) {
      lo[i] = beta_[i] - radius_;
      hi[i] = beta_[i] + radius_;
    }
    set_box(Box{lo, hi});
  }

  double gauge(const Vec& x) const override {
    double bx = dot(beta_, x);
    double n2 = dot(x, x);
    double root = std::sqrt(n2 + bx * bx);
    // rationalized when bx > 0 to avoid cancellation
    return bx > 0.0 ? n2 / (root + bx) : root - bx;
  }

  bool analytic_extrema(Vec& a, Vec& b) const override {
    a = bounding_box().lo;
    b = bounding_box().hi;
    return true;
  }

  std::optional<double> analytic_volume() const override {
    return Ellipsoid::unit_ball_volume(dim()) * std::pow(radius_, dim());
  }

  bool convex() const override { return true; }

  const Vec& beta() const { return beta_; }
  double radius() const { return radius_; }

 private:
  Vec beta_;
  double radius_;
};

// Convex polytope D = {a_k' x < 1 for all k} intersected with an optional
// open cone {c' x < 0}. Cone facets appear when the origin lies on the
// boundary of D; the gauge is +infinity outside the open cone.
class PolytopeShape : public StarShape {
 public:
  PolytopeShape(int dim, std::vector<Vec> facets, std::vector<Vec> cone_facets = {})
      : StarShape(dim, "polytope(m=" + std::to_string(facets.size()) + ")"),
        facets_(std::move(facets)),
        cone_facets_(std::move(cone_facets)) {
    if (facets_.empty())
      throw std::invalid_argument("PolytopeShape: needs at least one facet");
    for (const Vec& a : facets_)
      if (a.size() != dim)
        throw std::invalid_argument("PolytopeShape: facet dimension mismatch");
    for (const Vec& c : cone_facets_)
      if (c.size() != dim)
        throw std::invalid_argument("PolytopeShape: cone facet dimension mismatch");
    check_bounded();
    enumerate_vertices();
    Vec lo(dim, 0.0), hi(dim, 0.0);
    for (const Vec& v : vertices_)
      for (int i = 0; i < dim; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    set_box(Box{lo, hi});
  }

  // Convex polygon from its vertex list (d = 2). Edges whose supporting line
  // passes through the origin become cone facets.
  static PolytopeShape from_vertices(const std::vector<Vec>& verts) {
    if (verts.size() < 3)
      throw std::invalid_argument("PolytopeShape: need at least 3 vertices");
    std::vector<Vec> facets, cone_facets;
    const std::size_t m = verts.size();
    double scale = 0.0;
    for (const Vec& v : verts) scale = std::max(scale, norm_inf(v));
    for (std::size_t k = 0; k < m; ++k) {
      const Vec& v0 = verts[k];
      const Vec& v1 = verts[(k + 1) % m];
      Vec n{v1[1] - v0[1], -(v1[0] - v0[0])};  // normal to the edge
      double s = dot(n, v0);
      if (std::fabs(s) <= 1e-12 * scale * norm_inf(n)) {
        // supporting line through the origin: orient against the other verts
        double side = 0.0;
        for (const Vec& v : verts) side += dot(n, v);
        cone_facets.push_back(side > 0.0 ? Vec{-n[0], -n[1]} : n);
      } else {
        facets.push_back(n / s);
      }
    }
    return PolytopeShape(2, std::move(facets), std::move(cone_facets));
  }

  double gauge(const Vec& x) const override {
    bool at_origin = true;
    for (int i = 0; i < dim(); ++i) at_origin = at_origin && x[i] == 0.0;
    if (at_origin) return 0.0;
    for (const Vec& c : cone_facets_)
      if (dot(c, x) >= 0.0) return kInf;
    double m = 0.0;
    for (const Vec& a : facets_) m = std::max(m, dot(a, x));
    return m;
  }

  bool analytic_extrema(Vec& a, Vec& b) const override {
    a = bounding_box().lo;
    b = bounding_box().hi;
    return true;
  }

  std::optional<double> analytic_volume() const override {
    if (dim() != 2) return std::nullopt;
    // shoelace over the vertices sorted by angle around their centroid
    std::vector<Vec> vs = vertices_;
    Vec c(2);
    for (const Vec& v : vs) c += v / double(vs.size());
    std::sort(vs.begin(), vs.end(), [&](const Vec& p, const Vec& q) {
      return std::atan2(p[1] - c[1], p[0] - c[0]) <
             std::atan2(q[1] - c[1], q[0] - c[0]);
    });
    double area2 = 0.0;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const Vec& p = vs[k];
      const Vec& q = vs[(k + 1) % vs.size()];
      area2 += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::fabs(area2);
  }

  bool convex() const override { return true; }

  const std::vector<Vec>& vertices() const { return vertices_; }
  const std::vector<Vec>& facets() const { return facets_; }
  const std::vector<Vec>& cone_facets() const { return cone_facets_; }

 private:
  // Bounded iff the recession cone {x : g' x <= 0 for every row g} is {0};
  // scan unit directions for a violator.
  void check_bounded() const {
    auto worst = [&](const Vec& u) {
      double m = -kInf;
      for (const Vec& a : facets_) m = std::max(m, dot(a, u));
      for (const Vec& c : cone_facets_) m = std::max(m, dot(c, u));
      return m;
    };
    double best = kInf;
    if (dim() == 2) {
      for (int k = 0; k < 1024; ++k) {
        double th = 2.0 * std::numbers::pi * k / 1024.0;
        best = std::min(best, worst(Vec{std::cos(th), std::sin(th)}));
      }
    } else {
      Rng r(0x9E3779B9u, 0);
      for (int k = 0; k < 8192; ++k) {
        Vec u(dim());
        double n = 0.0;
        for (int i = 0; i < dim(); ++i) u[i] = r.normal();
        n = norm2(u);
        if (n == 0.0) continue;
        best = std::min(best, worst(u / n));
      }
    }
    if (best <= 1e-9)
      throw std::invalid_argument("PolytopeShape: unbounded facet system");
  }

  void enumerate_vertices() {
    std::vector<Vec> rows = facets_;
    std::vector<double> rhs(facets_.size(), 1.0);
    for (const Vec& c : cone_facets_) {
      rows.push_back(c);
      rhs.push_back(0.0);
    }
    const int d = dim();
    const std::size_t m = rows.size();
    if (m < static_cast<std::size_t>(d))
      throw std::invalid_argument("PolytopeShape: too few facets");
    // iterate over all d-subsets of the m rows
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) idx[i] = i;
    for (;;) {
      double a[kMaxDim * kMaxDim];
      double b[kMaxDim];
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) a[r * d + c] = rows[idx[r]][c];
        b[r] = rhs[idx[r]];
      }
      if (solve_linear(a, b, d)) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = b[i];
        bool feasible = true;
        for (std::size_t k = 0; k < m && feasible; ++k)
          feasible = dot(rows[k], v) <= rhs[k] + 1e-9;
        if (feasible) {
          bool fresh = true;
          for (const Vec& w : vertices_) {
            double diff = 0.0;
            for (int i = 0; i < d; ++i) diff = std::max(diff, std::fabs(w[i] - v[i]));
            if (diff <= 1e-9) {
              fresh = false;
              break;
            }
          }
          if (fresh) vertices_.push_back(v);
        }
      }
      // next combination
      int pos = d - 1;
      while (pos >= 0 && idx[pos] == m - static_cast<std::size_t>(d - pos)) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int q = pos + 1; q < d; ++q) idx[q] = idx[q - 1] + 1;
    }
    if (vertices_.empty())
      throw std::invalid_argument("PolytopeShape: facet system has no vertices");
  }

  std::vector<Vec> facets_;
  std::vector<Vec> cone_facets_;
  std::vector<Vec> vertices_;
};

// Limit shape of the skew-normal family: ellipsoidal on the half-space
// alpha' u >= 0, squeezed by the skewing term on the other side.
class SkewLimitShape : public StarShape {
 public:
  SkewLimitShape(int dim, const std::vector<double>& omega_row_major,
                 const Vec& alpha)
      : StarShape(dim, "skew(d=" + std::to_string(dim) + ")"),
        omega_(dim, omega_row_major),
        alpha_(alpha) {
    if (alpha.size() != dim)
      throw std::invalid_argument("SkewLimitShape: alpha dimension mismatch");
    double a2 = dot(alpha, alpha);
    if (a2 == 0.0)
      throw std::invalid_argument("SkewLimitShape: alpha must be non-zero");
    Vec lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      hi[i] = std::sqrt(omega_(i, i));  // contained in the omega ellipsoid
      lo[i] = -hi[i];
    }
    set_box(Box{lo, hi});
  }

  double gauge(const Vec& u) const override {
    double q = omega_.quadratic_form_inv(u);
    double au = dot(alpha_, u);
    if (au < 0.0) q += au * au;
    return std::sqrt(q);
  }

  std::optional<double> analytic_volume() const override {
    // two ellipsoid halves split by the central hyperplane alpha' u = 0
    double va = std::sqrt(omega_.det());
    double vb = va / std::sqrt(1.0 + quad_alpha());
    return 0.5 * Ellipsoid::unit_ball_volume(dim()) * (va + vb);
  }

  bool convex() const override { return true; }

  const SmallSpd& omega() const { return omega_; }
  const Vec& alpha() const { return alpha_; }

 private:
  double quad_alpha() const {  // alpha' Omega alpha
    double s = 0.0;
    for (int i = 0; i < dim(); ++i)
      for (int j = 0; j < dim(); ++j) s += alpha_[i] * omega_(i, j) * alpha_[j];
    return s;
  }

  SmallSpd omega_;
  Vec alpha_;
};

// Two-dimensional limit shape of the meta-t construction. Star-shaped but
// not convex: it bulges along the diagonals and pinches on the axes.
class MetaTShape : public StarShape {
 public:
  explicit MetaTShape(double lambda)
      : StarShape(2, "metat(lambda=" + std::to_string(lambda) + ")"),
        lambda_(lambda) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("MetaTShape: lambda must be positive");
    set_box(Box{Vec{-1.0, -1.0}, Vec{1.0, 1.0}});
  }

  double gauge(const Vec& x) const override {
    double mi = norm_inf(x);
    double q = ((lambda_ + 2.0) * mi * mi - dot(x, x)) / lambda_;
    return std::sqrt(q);
  }

  bool analytic_extrema(Vec& a, Vec& b) const override {
    a = Vec{-1.0, -1.0};
    b = Vec{1.0, 1.0};
    return true;
  }

  std::optional<double> analytic_volume() const override {
    // polar integration of r(theta)^2/2 across one octant
    double s = std::sqrt(lambda_ + 1.0);
    return 4.0 * lambda_ / s * std::atanh(1.0 / s);
  }

  bool convex() const override { return false; }

  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

// ---------------------------------------------------------------------------
// Geometric operations

inline Vec boundary_point(const StarShape& shape, const Vec& direction) {
  double g = shape.gauge(direction);
  if (!(g > 0.0) || std::isinf(g))
    throw DirectionOutsideCone(
        "boundary_point: direction has zero or infinite gauge");
  return direction / g;
}

struct Extrema {
  Vec a, b;
};

namespace detail {

inline Vec unit2(double theta) { return Vec{std::cos(theta), std::sin(theta)}; }

inline Vec unit3(double phi, double psi) {
  double c = std::cos(psi);
  return Vec{c * std::cos(phi), c * std::sin(phi), std::sin(psi)};
}

// Largest s * u_coord / gauge(u) over unit directions u; deterministic grid
// scan followed by local polish.
inline double extremum_scan(const StarShape& shape, int coord, double sign) {
  const int d = shape.dim();
  auto value = [&](const Vec& u) {
    double g = shape.gauge(u);
    if (!(g > 0.0) || std::isinf(g)) return -kInf;
    return sign * u[coord] / g;
  };
  if (d == 1) {
    return std::max(value(Vec{1.0}), value(Vec{-1.0}));
  }
  if (d == 2) {
    const int n = 257;
    double best = -kInf, best_th = 0.0;
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * std::numbers::pi * k / n;
      double v = value(unit2(th));
      if (v > best) {
        best = v;
        best_th = th;
      }
    }
    if (best == -kInf)
      throw ToleranceNotReached("extremum scan found no finite gauge direction");
    double step = 2.0 * std::numbers::pi / n;
    double th = golden_min([&](double t) { return -value(unit2(t)); },
                           best_th - step, best_th + step, 1e-12);
    return std::max(best, value(unit2(th)));
  }
  if (d == 3) {
    const int n = 257;
    double best = -kInf, best_phi = 0.0, best_psi = 0.0;
    for (int i = 0; i < n; ++i) {
      double phi = 2.0 * std::numbers::pi * i / n;
      for (int j = 0; j < n; ++j) {
        double psi = std::numbers::pi * (j + 0.5) / n - 0.5 * std::numbers::pi;
        double v = value(unit3(phi, psi));
        if (v > best) {
          best = v;
          best_phi = phi;
          best_psi = psi;
        }
      }
    }
    if (best == -kInf)
      throw ToleranceNotReached("extremum scan found no finite gauge direction");
    auto f = [&](const std::vector<double>& ang) {
      return -value(unit3(ang[0], ang[1]));
    };
    auto polished = nelder_mead(f, {best_phi, best_psi},
                                2.0 * std::numbers::pi / n, 1e-15, 400);
    return std::max(best, value(unit3(polished[0], polished[1])));
  }
  // d >= 4: deterministic multistart from a fixed Philox stream
  Rng r(0xC00DDu, static_cast<std::uint64_t>(coord) * 2 + (sign > 0 ? 0 : 1));
  double best = -kInf;
  Vec best_u(d);
  for (int k = 0; k < 8192; ++k) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = r.normal();
    double n = norm2(u);
    if (n == 0.0) continue;
    u = u / n;
    double v = value(u);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  if (best == -kInf)
    throw ToleranceNotReached("extremum scan found no finite gauge direction");
  auto f = [&](const std::vector<double>& xs) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u[i] = xs[i];
    double n = norm2(u);
    if (n == 0.0) return kInf;
    return -value(u / n);
  };
  std::vector<double> start(best_u.data(), best_u.data() + d);
  auto polished = nelder_mead(f, start, 0.05, 1e-15, 600);
  Vec u(d);
  for (int i = 0; i < d; ++i) u[i] = polished[i];
  double n = norm2(u);
  return std::max(best, n > 0.0 ? -f(polished) : -kInf);
}

}  // namespace detail

// Numeric path: direction-grid scan plus polish, independent of any
// analytic knowledge the shape carries.
inline Extrema numeric_coordinate_extrema(const StarShape& shape) {
  const int d = shape.dim();
  Extrema e{Vec(d), Vec(d)};
  for (int i = 0; i < d; ++i) {
    e.b[i] = detail::extremum_scan(shape, i, +1.0);
    e.a[i] = -detail::extremum_scan(shape, i, -1.0);
  }
  return e;
}

// Coordinatewise infimum a and supremum b of D. Analytic when the shape
// provides it, numeric scan otherwise.
inline Extrema coordinate_extrema(const StarShape& shape, double tol = 1e-6) {
  if (!(tol > 0.0)) throw std::invalid_argument("coordinate_extrema: tol <= 0");
  Vec a, b;
  if (shape.analytic_extrema(a, b)) return {a, b};
  return numeric_coordinate_extrema(shape);
}

namespace detail {

inline Vec embed_pair(const StarShape& shape, int i, int j, const Vec& u,
                      const std::vector<double>& w) {
  Vec x(shape.dim(), 0.0);
  x[i] = u[0];
  x[j] = u[1];
  std::size_t k = 0;
  for (int c = 0; c < shape.dim(); ++c)
    if (c != i && c != j) x[c] = w[k++];
  return x;
}

}  // namespace detail

// Gauge of the projection of D onto coordinates (i, j) at the 2-vector u:
// the infimum of gauge over the dropped coordinates. The search window
// starts at twice the bounding box of the dropped coordinates and expands
// whenever the minimizer touches its edge (the minimizer of a point with
// projection gauge g lives in g times the box).
inline double projection_gauge(const StarShape& shape, int i, int j,
                               const Vec& u, double tol = 1e-9) {
  const int d = shape.dim();
  if (i == j || i < 0 || j < 0 || i >= d || j >= d)
    throw std::invalid_argument("projection_gauge: bad axis pair");
  if (!(tol > 0.0)) throw std::invalid_argument("projection_gauge: tol <= 0");
  if (d == 2) {
    Vec x(2);
    x[i] = u[0];
    x[j] = u[1];
    return shape.gauge(x);
  }
  std::vector<int> dropped;
  for (int c = 0; c < d; ++c)
    if (c != i && c != j) dropped.push_back(c);
  const std::size_t nd = dropped.size();
  const Box& box = shape.bounding_box();

  auto value = [&](const std::vector<double>& w) {
    return shape.gauge(detail::embed_pair(shape, i, j, u, w));
  };

  double scale = 2.0;
  for (int expand = 0; expand < 7; ++expand) {
    std::vector<double> lo(nd), hi(nd);
    for (std::size_t k = 0; k < nd; ++k) {
      lo[k] = scale * box.lo[dropped[k]];
      hi[k] = scale * box.hi[dropped[k]];
    }
    double best = kInf;
    std::vector<double> best_w(nd, 0.0);
    if (nd == 1) {
      const int n = 257;
      for (int k = 0; k < n; ++k) {
        std::vector<double> w{lo[0] + (hi[0] - lo[0]) * k / (n - 1.0)};
        double v = value(w);
        if (v < best) {
          best = v;
          best_w = w;
        }
      }
      if (std::isfinite(best)) {
        double step = (hi[0] - lo[0]) / (n - 1.0);
        double wmin = golden_min([&](double w) { return value({w}); },
                                 best_w[0] - step, best_w[0] + step, 1e-13);
        double v = value({wmin});
        if (v < best) {
          best = v;
          best_w[0] = wmin;
        }
      }
    } else {
      // coarse lattice plus one polish; dropped dimension count is d-2 <= 6
      int n = nd <= 2 ? 33 : (nd <= 3 ? 17 : 9);
      std::vector<int> ix(nd, 0);
      for (;;) {
        std::vector<double> w(nd);
        for (std::size_t k = 0; k < nd; ++k)
          w[k] = lo[k] + (hi[k] - lo[k]) * ix[k] / (n - 1.0);
        double v = value(w);
        if (v < best) {
          best = v;
          best_w = w;
        }
        std::size_t pos = 0;
        while (pos < nd && ++ix[pos] == n) ix[pos++] = 0;
        if (pos == nd) break;
      }
      if (std::isfinite(best)) {
        double step = 0.0;
        for (std::size_t k = 0; k < nd; ++k)
          step = std::max(step, (hi[k] - lo[k]) / (n - 1.0));
        auto polished = nelder_mead(
            [&](const std::vector<double>& w) { return value(w); }, best_w,
            step, 1e-15, 500);
        double v = value(polished);
        if (v < best) {
          best = v;
          best_w = polished;
        }
      }
    }
    bool on_edge = false;
    for (std::size_t k = 0; k < nd; ++k) {
      double width = hi[k] - lo[k];
      if (width > 0.0 && (best_w[k] - lo[k] < 0.01 * width ||
                          hi[k] - best_w[k] < 0.01 * width))
        on_edge = true;
    }
    if (!on_edge || !std::isfinite(best)) return best;
    scale *= 2.0;
  }
  throw ToleranceNotReached("projection_gauge: minimizer kept escaping the window");
}

enum class BluntVerdict { Blunt, NonBlunt, Marginal };

inline const char* to_string(BluntVerdict v) {
  switch (v) {
    case BluntVerdict::Blunt: return "blunt";
    case BluntVerdict::NonBlunt: return "non-blunt";
    default: return "marginal";
  }
}

struct BluntReport {
  BluntVerdict verdict;
  double witness;  // g = projection gauge at the coordinatewise supremum
};

// Bluntness of the (i, j) projection: g = n_{D_ij}(b_i, b_j) where b is the
// coordinatewise supremum. Mathematically g >= 1 always; g > 1 means the
// supremum escapes the closure (blunt). Numerically: g > 1 + tol is Blunt,
// g within the tight boundary band is NonBlunt, anything else (including
// the suspicious g < 1) is Marginal.
inline BluntReport is_blunt(const StarShape& shape, int i, int j,
                            double tol = 1e-3) {
  if (!(tol > 0.0)) throw std::invalid_argument("is_blunt: tol <= 0");
  Extrema e = coordinate_extrema(shape);
  Vec u{e.b[i], e.b[j]};
  double g = projection_gauge(shape, i, j, u);
  constexpr double kBoundaryBand = 1e-6;
  if (g > 1.0 + tol) return {BluntVerdict::Blunt, g};
  if (std::fabs(g - 1.0) <= kBoundaryBand) return {BluntVerdict::NonBlunt, g};
  return {BluntVerdict::Marginal, g};
}

struct McEstimate {
  double value;
  double std_error;
};

// Hit-or-miss volume over the bounding box. Block-structured streams keep
// the estimate identical for any thread count.
inline McEstimate volume(const StarShape& shape, std::size_t n_mc,
                         std::uint64_t seed, int n_threads = 0) {
  if (n_mc < 1000) throw std::invalid_argument("volume: n_mc must be >= 1000");
  const Box& box = shape.bounding_box();
  const int d = shape.dim();
  for (int i = 0; i < d; ++i)
    if (!(box.width(i) > 0.0)) throw DegenerateBox("volume: zero-width box");
  if (n_threads <= 0) n_threads = default_threads();

  const std::size_t block = 1 << 16;
  const std::size_t n_blocks = (n_mc + block - 1) / block;
  std::vector<std::size_t> hits(n_blocks, 0);
  parallel_blocks(n_blocks, n_threads, [&](std::size_t bi) {
    Rng r(seed, bi);
    std::size_t lo = bi * block;
    std::size_t hi = std::min(n_mc, lo + block);
    std::size_t h = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      Vec x(d);
      for (int i = 0; i < d; ++i)
        x[i] = box.lo[i] + box.width(i) * r.uniform01();
      if (shape.gauge(x) < 1.0) ++h;
    }
    hits[bi] = h;
  });
  std::size_t total = 0;
  for (std::size_t h : hits) total += h;
  double p = static_cast<double>(total) / static_cast<double>(n_mc);
  double bv = box.volume();
  double se = bv * std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc));
  return {bv * p, se};
}

}  // namespace starshape
