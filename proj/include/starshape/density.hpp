// Normalized densities with star-shaped level sets. The workhorse is the
// homothetic family c * f0(n_D(x)) with an exact radial/angular sampler;
// three hand-built exemplars (skew-normal, meta-t, a sliced triangle)
// exercise the non-homothetic corners of the theory. Every sampler is
// exact and, for a fixed seed, produces one canonical output no matter
// how many threads fill it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "starshape/errors.hpp"
#include "starshape/generators.hpp"
#include "starshape/quadrature.hpp"
#include "starshape/rng.hpp"
#include "starshape/shapes.hpp"
#include "starshape/special.hpp"
#include "starshape/vec.hpp"

namespace starshape {

// Rows [b*kSampleBlock, ...) of a run with seed s are drawn from Rng(s, b),
// so the sample matrix is identical for every thread count.
inline constexpr std::size_t kSampleBlock = 4096;

// A rejection loop that fails this many times in a row has acceptance
// rate below 1e-4 with overwhelming probability; treat it as misconfigured.
inline constexpr int kStallWindow = 100000;

class Density {
 public:
  virtual ~Density() = default;

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }

  virtual double log_pdf(const Vec& x) const = 0;
  double pdf(const Vec& x) const {
    double lp = log_pdf(x);
    return std::isfinite(lp) ? std::exp(lp) : 0.0;
  }

  // Box of a high level set {pdf > ~1e-12 * peak}; normalization_check
  // and other box integrals run over it.
  virtual Box integration_box() const = 0;

  // One exact draw; the primitive behind sample().
  virtual void draw(Rng& rng, Vec& out) const = 0;

  Matrix sample(std::size_t n, std::uint64_t seed, int n_threads = 0) const {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    Matrix out(n, dim_);
    std::size_t n_blocks = (n + kSampleBlock - 1) / kSampleBlock;
    int threads = n_threads > 0 ? n_threads : default_threads();
    parallel_blocks(n_blocks, threads, [&](std::size_t b) {
      Rng rng(seed, b);
      Vec x(dim_);
      std::size_t lo = b * kSampleBlock;
      std::size_t hi = std::min(n, lo + kSampleBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        draw(rng, x);
        out.set_point(i, x);
      }
    });
    return out;
  }

 protected:
  Density(int dim, std::string label) : dim_(dim), label_(std::move(label)) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("Density: dimension out of range");
  }

 private:
  int dim_;
  std::string label_;
};

using DensityPtr = std::shared_ptr<const Density>;

// f(x) = c * f0(n_D(x)). The sampler splits a draw into an angular part
// (the cone measure: Theta = V / n_D(V) for V uniform on D) and a radial
// part (R with density proportional to r^{d-1} f0(r), drawn by inverse
// CDF from a tabulated radius law). docs/ carries the proof that R*Theta
// has exactly the density f.
class HomotheticDensity : public Density {
 public:
  HomotheticDensity(ShapePtr shape, GeneratorPtr gen,
                    std::size_t volume_mc = 4000000,
                    std::uint64_t volume_seed = 0xA11CEull)
      : Density(shape ? shape->dim() : 0,
                gen && shape ? gen->label() + " over " + shape->label() : ""),
        shape_(std::move(shape)),
        gen_(std::move(gen)) {
    if (!shape_ || !gen_)
      throw std::invalid_argument("HomotheticDensity: null shape or generator");
    if (auto v = shape_->analytic_volume())
      vol_ = *v;
    else
      vol_ = volume(*shape_, volume_mc, volume_seed).value;
    c_norm_ = normalizing_constant(*shape_, *gen_, 1e-9, vol_);
    build_radial_table();
  }

  const StarShape& shape() const { return *shape_; }
  const Generator& generator() const { return *gen_; }
  ShapePtr shape_ptr() const { return shape_; }
  GeneratorPtr generator_ptr() const { return gen_; }
  double c_norm() const { return c_norm_; }
  double shape_volume() const { return vol_; }
  double peak() const { return c_norm_ * gen_->eval(0.0); }

  // Fraction of bounding-box proposals that land inside D.
  double box_efficiency() const {
    return vol_ / shape_->bounding_box().volume();
  }

  double log_pdf(const Vec& x) const override {
    double g = shape_->gauge(x);
    if (!std::isfinite(g)) return -kInf;
    return std::log(c_norm_) + gen_->log_eval(g);
  }

  // {pdf > level} = r D with f0(r) = level / c.
  double level_set_radius(double level) const {
    return level_radius(*gen_, c_norm_, level);
  }

  // Law of the gauge of a draw: P(n_D(X) <= r), exact.
  double radial_cdf(double r) const {
    if (r <= 0.0) return 0.0;
    return 1.0 - radial_survival(r);
  }
  double radial_survival(double r) const {
    if (r <= 0.0) return 1.0;
    return gen_->radial_tail_mass(r, dim()) / radial_total_;
  }

  // Inverse of radial_cdf. Table lookup with monotone cubic Hermite
  // interpolation; below the first knot a power-law extension (the radius
  // density is ~ r^{d-1} f0(0) there), above the last knot exact
  // bisection on the closed-form survival.
  double radial_quantile(double u) const {
    if (!(u > 0.0) || !(u < 1.0))
      throw NumericError("radial_quantile: u must lie strictly inside (0,1)");
    double s = 1.0 - u;  // survival; exact for u >= 0.5 where it matters
    if (s >= surv_.front())
      return r_.front() * std::pow(u / u_first_, 1.0 / dim());
    if (s <= surv_.back()) return survival_radius(s, r_.back());
    // knots are strictly decreasing in survival; find k with
    // surv_[k] > s >= surv_[k+1]
    std::size_t lo = 0, hi = surv_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (surv_[mid] > s)
        lo = mid;
      else
        hi = mid;
    }
    double h = surv_[lo] - surv_[hi];  // > 0, no cancellation: knot values
    double t = (surv_[lo] - s) / h;    // are exact closed-form survivals
    double sec = (r_[hi] - r_[lo]) / h;
    // dr/d(-survival) = 1 / f_R(r); cap at 3x the secant so the cubic
    // stays monotone (Fritsch-Carlson)
    double d0 = std::min(1.0 / pdf_r_[lo], 3.0 * sec);
    double d1 = std::min(1.0 / pdf_r_[hi], 3.0 * sec);
    double t2 = t * t, t3 = t2 * t;
    return r_[lo] * (2.0 * t3 - 3.0 * t2 + 1.0) +
           h * d0 * (t3 - 2.0 * t2 + t) + r_[hi] * (-2.0 * t3 + 3.0 * t2) +
           h * d1 * (t3 - t2);
  }

  Box integration_box() const override {
    double r = level_set_radius(1e-12 * peak());
    // heavy tails: a level-set box would be enormous; clamp at gauge
    // radius 1e3, which still captures all but O(1e-3) of the mass
    if (!gen_->rapid()) r = std::min(r, 1e3);
    return shape_->bounding_box().scaled(r);
  }

  void draw(Rng& rng, Vec& out) const override {
    const Box& box = shape_->bounding_box();
    const int d = dim();
    double g = 0.0;
    int stall = 0;
    for (;;) {
      for (int i = 0; i < d; ++i) out[i] = rng.uniform(box.lo[i], box.hi[i]);
      g = shape_->gauge(out);
      if (g > 0.0 && g < 1.0) break;
      if (++stall >= kStallWindow)
        throw RejectionStall("homothetic draw: bounding-box acceptance stalled");
    }
    double scale = radial_quantile(rng.uniform01()) / g;
    for (int i = 0; i < d; ++i) out[i] *= scale;
  }

 private:
  static constexpr int kKnots = 4096;

  void build_radial_table() {
    const int d = dim();
    radial_total_ = gen_->radial_tail_mass(0.0, d);
    if (!(radial_total_ > 0.0) || !std::isfinite(radial_total_))
      throw DivergentIntegral("radial table: profile not integrable");
    // anchor the grid where the CDF is ~1e-9 (leading order
    // F ~ f0(0) r^d / (d I)) and where the survival is ~1e-12 (exact)
    double r_lo =
        std::pow(1e-9 * d * radial_total_ / gen_->eval(0.0), 1.0 / d);
    double r_hi = survival_radius(1e-12, std::max(2.0 * r_lo, 1.0));
    if (!(r_hi > r_lo))
      throw NumericError("radial table: degenerate knot range");
    r_.resize(kKnots);
    surv_.resize(kKnots);
    pdf_r_.resize(kKnots);
    double ratio = std::log(r_hi / r_lo) / (kKnots - 1);
    for (int k = 0; k < kKnots; ++k) {
      double r = r_lo * std::exp(ratio * k);
      r_[k] = r;
      surv_[k] = radial_survival(r);
      pdf_r_[k] = std::pow(r, d - 1) * gen_->eval(r) / radial_total_;
    }
    for (int k = 1; k < kKnots; ++k)
      if (!(surv_[k] < surv_[k - 1]))
        throw NumericError("radial table: survival not strictly decreasing");
    u_first_ = 1.0 - surv_.front();
  }

  // r with survival(r) = s, by bisection in log r. The bracket doubles
  // from the hint; radii are capped near the top of the double range
  // (profiles with extremely slow tails cannot be represented anyway).
  double survival_radius(double s, double hint) const {
    double lo = std::max(hint, 1e-300);
    double surv_lo = radial_survival(lo);
    if (surv_lo < s) {  // walk the lower end down instead
      while (surv_lo < s) {
        lo *= 0.5;
        if (lo < 1e-300)
          throw ToleranceNotReached("survival_radius: lower bracket vanished");
        surv_lo = radial_survival(lo);
      }
    }
    double hi = 2.0 * lo;
    while (radial_survival(hi) > s) {
      hi *= 2.0;
      if (hi > 1e300)
        throw ToleranceNotReached("survival_radius: radius out of range");
    }
    double lr = bisect(
        [&](double t) { return radial_survival(std::exp(t)) - s; },
        std::log(lo / 2.0), std::log(hi), 1e-15, 400);
    return std::exp(lr);
  }

  ShapePtr shape_;
  GeneratorPtr gen_;
  double vol_ = 0.0;
  double c_norm_ = 0.0;
  double radial_total_ = 0.0;
  double u_first_ = 0.0;
  std::vector<double> r_, surv_, pdf_r_;
};

// f(x) = 2 phi_Omega(x) Phi(alpha.x). Sampler: Z ~ N(0, Omega), W ~ N(0,1)
// independent; X = Z when W <= alpha.Z, else -Z.
class SkewNormalDensity : public Density {
 public:
  SkewNormalDensity(SmallSpd omega, Vec alpha)
      : Density(omega.dim(), "skew-normal"),
        omega_(std::move(omega)),
        alpha_(alpha) {
    if (alpha.size() != dim())
      throw std::invalid_argument("SkewNormalDensity: alpha dimension mismatch");
    log_phi_const_ = -0.5 * dim() * std::log(2.0 * std::numbers::pi) -
                     0.5 * std::log(omega_.det());
  }

  const SmallSpd& omega() const { return omega_; }
  const Vec& alpha() const { return alpha_; }

  double log_pdf(const Vec& x) const override {
    return std::numbers::ln2 + log_phi_const_ -
           0.5 * omega_.quadratic_form_inv(x) + norm_log_cdf(dot(alpha_, x));
  }

  Box integration_box() const override {
    Vec lo(dim()), hi(dim());
    for (int i = 0; i < dim(); ++i) {
      double w = 8.5 * std::sqrt(omega_(i, i));
      lo[i] = -w;
      hi[i] = w;
    }
    return Box{lo, hi};
  }

  void draw(Rng& rng, Vec& out) const override {
    Vec g(dim());
    for (int i = 0; i < dim(); ++i) g[i] = rng.normal();
    Vec z = omega_.apply_chol(g);
    double w = rng.normal();
    double flip = w <= dot(alpha_, z) ? 1.0 : -1.0;
    for (int i = 0; i < dim(); ++i) out[i] = flip * z[i];
  }

 private:
  SmallSpd omega_;
  Vec alpha_;
  double log_phi_const_ = 0.0;
};

namespace detail {

// log(1 + e^t) without overflow
inline double log1p_exp(double t) {
  if (t > 36.0) return t;
  if (t < -36.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

// log(e^a + e^b); either argument may be -inf
inline double logsumexp2(double a, double b) {
  double m = std::max(a, b);
  if (m == -kInf) return -kInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace detail

// Bivariate spherical t with lambda degrees of freedom, pushed coordinate-
// wise through Phi^{-1}(T_lambda(.)): the t copula with standard normal
// marginals. lambda = 1 is the meta-Cauchy distribution.
class MetaTDensity : public Density {
 public:
  explicit MetaTDensity(double lambda) : Density(2, "meta-t"), lambda_(lambda) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("MetaTDensity: lambda must be positive");
    log_c1_ = std::lgamma(0.5 * (lambda + 1.0)) - std::lgamma(0.5 * lambda) -
              0.5 * std::log(lambda * std::numbers::pi);
    // upper t tail: Tbar(z) = A z^{-lambda} (1 + O(z^{-2})) with
    // A = c1 * lambda^{(lambda-1)/2}; used when |x| is so large that z
    // itself would overflow
    log_a_ = log_c1_ + 0.5 * (lambda - 1.0) * std::log(lambda);
  }

  double lambda() const { return lambda_; }

  double log_pdf(const Vec& x) const override {
    const double llam = std::log(lambda_);
    double log_jac = 0.0;   // sum of log phi(x_i) - log f_t1(z_i)
    double lz2 = -kInf;     // log(z1^2 + z2^2)
    for (int i = 0; i < 2; ++i) {
      double ax = std::fabs(x[i]);
      double log_z;  // log |z_i|
      if (ax <= 8.0) {
        // z through the lower tail keeps the quantile map full-precision
        double zn = student_t_quantile(norm_cdf(-ax), lambda_);
        log_z = zn == 0.0 ? -kInf : std::log(-zn);
      } else {
        // beyond |x| ~ 8 the asymptotic t tail is exact to double
        // precision (relative error O(z^{-2}) ~ 1e-29)
        log_z = (log_a_ - norm_log_cdf(-ax)) / lambda_;
      }
      lz2 = detail::logsumexp2(lz2, 2.0 * log_z);
      double log_f1 =
          log_c1_ - 0.5 * (lambda_ + 1.0) *
                        (log_z == -kInf
                             ? 0.0
                             : detail::log1p_exp(2.0 * log_z - llam));
      double log_phi_x =
          -0.5 * ax * ax - 0.5 * std::log(2.0 * std::numbers::pi);
      log_jac += log_phi_x - log_f1;
    }
    double log_f2 =
        -std::log(2.0 * std::numbers::pi) -
        0.5 * (lambda_ + 2.0) *
            (lz2 == -kInf ? 0.0 : detail::log1p_exp(lz2 - llam));
    return log_f2 + log_jac;
  }

  Box integration_box() const override {
    // marginals are exactly standard normal
    return Box{{-8.6, -8.6}, {8.6, 8.6}};
  }

  void draw(Rng& rng, Vec& out) const override {
    double g0 = rng.normal();
    double g1 = rng.normal();
    double s = rng.chi_square(lambda_);
    double scale = std::sqrt(lambda_ / s);
    double z[2] = {g0 * scale, g1 * scale};
    for (int i = 0; i < 2; ++i) {
      // map through the negative tail on both sides: T(-|z|) is a small
      // probability computed without cancellation
      double p = student_t_cdf(-std::fabs(z[i]), lambda_);
      double q = norm_quantile(p);
      out[i] = z[i] >= 0.0 ? -q : q;
    }
  }

 private:
  double lambda_;
  double log_c1_ = 0.0;
  double log_a_ = 0.0;
};

namespace detail {

// Area of a convex polygon clipped to the halfplane a.x <= b.
inline double clipped_area(const std::vector<Vec>& poly, const Vec& a,
                           double b) {
  std::vector<Vec> out;
  out.reserve(poly.size() + 2);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % n];
    double dp = dot(a, p) - b, dq = dot(a, q) - b;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  if (out.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Vec& p = out[i];
    const Vec& q = out[(i + 1) % out.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::fabs(s);
}

}  // namespace detail

// f(x) = c exp(-t(x)) with t(x) = max(n_D(x), tau(x1 + x2)) over the
// triangle D with vertices (1,1), (-1,0), (0,-1). The extra exponent tau
// slices the level sets: {t < t0} = t0 D minus {x1 + x2 >= 2 t0 - sqrt(t0)}
// for t0 >= 1/4 (below that the cut sits at x1 + x2 = 0). The set stays
// non-blunt while the samples still decouple in the tails.
class SlicedTriangleDensity : public Density {
 public:
  SlicedTriangleDensity() : Density(2, "sliced-triangle") {
    auto tri = std::make_shared<PolytopeShape>(
        PolytopeShape::from_vertices({{1.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}));
    shape_ = tri;
    proposal_ = std::make_shared<HomotheticDensity>(
        tri, std::make_shared<WeibullGenerator>(1.0, 1.0));
    // c = 1 / integral of exp(-t(x)): layer cake over the level areas,
    // split at the kink t = 1/4 where the slice line leaves the origin
    auto level_area = [&](double t) {
      if (t <= 0.0) return 0.0;
      std::vector<Vec> poly = {{t, t}, {-t, 0.0}, {0.0, -t}};
      double cut = t >= 0.25 ? 2.0 * t - std::sqrt(t) : 0.0;
      return detail::clipped_area(poly, {1.0, 1.0}, cut);
    };
    auto integrand = [&](double t) { return level_area(t) * std::exp(-t); };
    double mass = integrate_rel(integrand, 0.0, 0.25, 1e-12) +
                  integrate_rel(integrand, 0.25, 120.0, 1e-12);
    c_norm_ = 1.0 / mass;
  }

  const StarShape& shape() const { return *shape_; }
  double c_norm() const { return c_norm_; }

  // the slicing exponent: tau solves 2 tau - sqrt(tau) = s on s > 0
  static double slice_exponent(double s) {
    if (s <= 0.0) return 0.0;
    double w = 0.25 * (1.0 + std::sqrt(1.0 + 8.0 * s));
    return w * w;
  }

  double exponent(const Vec& x) const {
    double g = shape_->gauge(x);
    if (!std::isfinite(g)) return kInf;
    return std::max(g, slice_exponent(x[0] + x[1]));
  }

  double log_pdf(const Vec& x) const override {
    double t = exponent(x);
    if (!std::isfinite(t)) return -kInf;
    return std::log(c_norm_) - t;
  }

  Box integration_box() const override {
    // pdf <= c exp(-n_D), so {pdf > 1e-12 c} sits inside log(1e12) * D
    return shape_->bounding_box().scaled(std::log(1e12));
  }

  void draw(Rng& rng, Vec& out) const override {
    int stall = 0;
    for (;;) {
      proposal_->draw(rng, out);
      double g = shape_->gauge(out);
      double t = std::max(g, slice_exponent(out[0] + out[1]));
      if (rng.uniform01() <= std::exp(g - t)) return;
      if (++stall >= kStallWindow)
        throw RejectionStall("sliced-triangle draw: acceptance stalled");
    }
  }

 private:
  ShapePtr shape_;
  std::shared_ptr<const HomotheticDensity> proposal_;
  double c_norm_ = 0.0;
};

namespace detail {

struct StratPart {
  double value = 0.0;
  double var = 0.0;
};

// Stratification of the integration box: nested origin-centered cubes with
// side ratio sqrt(2); each shell between consecutive cubes splits exactly
// into 2d axis slabs, each slab is cut along its longest axis, and the
// innermost cube gets a small grid. Everything is clipped to the box (which
// need not be symmetric, or even contain the origin). The geometry is fixed
// up front, so the per-stratum variance estimates are trustworthy even for
// integrands with a sharp peak at the origin, where adaptive splitting
// schemes misjudge their pilots.
inline std::vector<Box> integration_strata(const Box& box) {
  const int d = box.dim();
  constexpr int kRings = 24;
  const int subdiv = d == 2 ? 4 : 2;
  const int core = 4;
  double a = 0.0;
  for (int i = 0; i < d; ++i)
    a = std::max({a, std::fabs(box.lo[i]), std::fabs(box.hi[i])});
  std::vector<Box> out;
  auto clip = [&](Box s) {
    for (int i = 0; i < d; ++i) {
      s.lo[i] = std::max(s.lo[i], box.lo[i]);
      s.hi[i] = std::min(s.hi[i], box.hi[i]);
      if (!(s.hi[i] > s.lo[i])) return;
    }
    out.push_back(std::move(s));
  };
  auto cut_longest = [&](const Box& s) {
    int ax = 0;
    double w = 0.0;
    for (int i = 0; i < d; ++i)
      if (s.hi[i] - s.lo[i] > w) {
        w = s.hi[i] - s.lo[i];
        ax = i;
      }
    for (int k = 0; k < subdiv; ++k) {
      Box p = s;
      p.lo[ax] = s.lo[ax] + w * k / subdiv;
      p.hi[ax] = s.lo[ax] + w * (k + 1) / subdiv;
      clip(p);
    }
  };
  for (int j = 0; j < kRings; ++j) {
    double b = a / std::numbers::sqrt2;
    // cube(a) minus cube(b): slab i spans |x_i| in [b, a]; coordinates
    // before i run to a, after i only to b, so the slabs tile the shell
    for (int i = 0; i < d; ++i) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        Box s{Vec(d), Vec(d)};
        for (int j2 = 0; j2 < d; ++j2) {
          double c = j2 < i ? a : b;
          s.lo[j2] = -c;
          s.hi[j2] = c;
        }
        s.lo[i] = sgn < 0 ? -a : b;
        s.hi[i] = sgn < 0 ? -b : a;
        cut_longest(s);
      }
    }
    a = b;
  }
  const int cells = d == 2 ? core * core : core;
  for (int cell = 0; cell < cells; ++cell) {
    Box s{Vec(d), Vec(d)};
    for (int i = 0; i < d; ++i) {
      s.lo[i] = -a;
      s.hi[i] = a;
    }
    if (d == 2) {
      int cx = cell % core, cy = cell / core;
      s.lo[0] = -a + 2.0 * a * cx / core;
      s.hi[0] = -a + 2.0 * a * (cx + 1) / core;
      s.lo[1] = -a + 2.0 * a * cy / core;
      s.hi[1] = -a + 2.0 * a * (cy + 1) / core;
    } else {
      s.lo[0] = -a + 2.0 * a * cell / core;
      s.hi[0] = -a + 2.0 * a * (cell + 1) / core;
    }
    clip(s);
  }
  if (out.empty()) throw NumericError("integration_strata: empty box");
  return out;
}

// Stratified uniform MC: a fixed pilot per stratum estimates the standard
// deviations, the main budget then goes out Neyman-style (proportional to
// volume times sigma, with a floor). The two passes use separate streams,
// so the estimate stays unbiased. Deterministic given the seed.
inline StratPart stratified_integrate(const Density& den, const Box& box,
                                      std::size_t n, std::uint64_t seed) {
  const std::vector<Box> strata = integration_strata(box);
  const std::size_t K = strata.size();
  const int d = box.dim();
  const std::size_t pilot = std::clamp<std::size_t>(n / (4 * K), 8, 64);
  Vec x(d);
  auto sweep = [&](const Box& s, std::size_t m, Rng& rng, double& mean,
                   double& var_mean) {
    double a = 0.0, a2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (int j = 0; j < d; ++j) x[j] = rng.uniform(s.lo[j], s.hi[j]);
      double v = den.pdf(x);
      a += v;
      a2 += v * v;
    }
    mean = a / m;
    var_mean =
        m > 1 ? std::max(0.0, a2 / m - mean * mean) / (m - 1) : 0.0;
  };
  std::vector<double> weight(K), vol(K);
  double wsum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    vol[k] = strata[k].volume();
    Rng rng(derive_seed(seed, 2 * k), 0);
    double mean = 0.0, vm = 0.0;
    sweep(strata[k], pilot, rng, mean, vm);
    weight[k] = std::sqrt(vm * pilot) * vol[k];  // vol x sigma
    wsum += weight[k];
  }
  const std::size_t n_main = n > pilot * K ? n - pilot * K : K;
  StratPart part;
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t mk = std::max<std::size_t>(
        16, wsum > 0.0
                ? static_cast<std::size_t>(n_main * weight[k] / wsum)
                : n_main / K);
    Rng rng(derive_seed(seed, 2 * k + 1), 0);
    double mean = 0.0, vm = 0.0;
    sweep(strata[k], mk, rng, mean, vm);
    part.value += mean * vol[k];
    part.var += vm * vol[k] * vol[k];
  }
  return part;
}

}  // namespace detail

// Integrates the pdf over its own high-level-set box; for a correctly
// normalized density the estimate is 1 up to the truncated tail mass.
inline McEstimate normalization_check(const Density& den, std::size_t n_mc,
                                      std::uint64_t seed) {
  if (n_mc < 10000)
    throw std::invalid_argument("normalization_check: n_mc must be >= 1e4");
  detail::StratPart p = detail::stratified_integrate(
      den, den.integration_box(), n_mc, derive_seed(seed, 0x901Dull));
  return {p.value, std::sqrt(p.var)};
}

}  // namespace starshape
