// Radial decay profiles f0: strictly decreasing positive functions of the
// gauge value. A homothetic density is c * f0(gauge(x)); everything the
// normalization, level sets, and cloud scaling need about f0 lives here.
// All evaluation is routed through log scale so radii far beyond the bulk
// cannot underflow intermediate results.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "starshape/errors.hpp"
#include "starshape/quadrature.hpp"
#include "starshape/shapes.hpp"
#include "starshape/special.hpp"

namespace starshape {

// Tail-variation class tags. Rapid: f0(t x)/f0(t) -> 0 for x > 1 (Weibull
// style); Regular: the ratio converges to x^exponent with exponent -(lambda+d).
struct Rapid {
  double theta, kappa;
};
struct Regular {
  double lambda;
  double exponent;
};
using Variation = std::variant<Rapid, Regular>;

class Generator {
 public:
  virtual ~Generator() = default;

  virtual double log_eval(double r) const = 0;
  double eval(double r) const { return std::exp(log_eval(r)); }

  // f0(r) = c solved for r; c must lie in (0, f0(0)].
  virtual double inverse(double c) const = 0;

  virtual Variation variation() const = 0;

  // Exact integral of s^{d-1} f0(s) over [R, infinity).
  virtual double radial_tail_mass(double R, int d) const = 0;

  // argmax of s^{d-1} f0(s); the quadrature truncation search starts here.
  virtual double integrand_peak(int d) const = 0;

  virtual std::string label() const = 0;

  bool rapid() const { return std::holds_alternative<Rapid>(variation()); }
};

using GeneratorPtr = std::shared_ptr<const Generator>;

// f0(r) = exp(-(r/kappa)^theta); rapidly varying for every theta > 0.
class WeibullGenerator : public Generator {
 public:
  WeibullGenerator(double theta, double kappa) : theta_(theta), kappa_(kappa) {
    if (!(theta > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("WeibullGenerator: theta, kappa must be > 0");
  }

  double log_eval(double r) const override {
    return -std::pow(r / kappa_, theta_);
  }

  double inverse(double c) const override {
    if (!(c > 0.0) || c > 1.0)
      throw LevelOutOfRange("WeibullGenerator: inverse argument outside (0, 1]");
    return kappa_ * std::pow(-std::log(c), 1.0 / theta_);
  }

  Variation variation() const override { return Rapid{theta_, kappa_}; }

  double radial_tail_mass(double R, int d) const override {
    // substitute u = (s/kappa)^theta
    double a = d / theta_;
    double u = std::pow(R / kappa_, theta_);
    double lg = std::lgamma(a);
    return std::pow(kappa_, d) / theta_ * std::exp(lg) * inc_gamma_q(a, u);
  }

  double integrand_peak(int d) const override {
    if (d <= 1) return 0.0;
    return kappa_ * std::pow((d - 1) / theta_, 1.0 / theta_);
  }

  std::string label() const override {
    return "weibull(theta=" + std::to_string(theta_) +
           ",kappa=" + std::to_string(kappa_) + ")";
  }

  double theta() const { return theta_; }
  double kappa() const { return kappa_; }

 private:
  double theta_, kappa_;
};

// f0(r) = (1+r)^{-(lambda+d)}; regularly varying with exponent -(lambda+d).
// lambda <= 0 would make the radial integral diverge, so it is rejected here.
class ParetoGenerator : public Generator {
 public:
  ParetoGenerator(double lambda, int d) : lambda_(lambda), d_(d) {
    if (d < 1 || d > kMaxDim)
      throw std::invalid_argument("ParetoGenerator: bad dimension");
    if (!(lambda > 0.0))
      throw DivergentIntegral(
          "ParetoGenerator: lambda must be positive for an integrable profile");
  }

  double log_eval(double r) const override {
    return -(lambda_ + d_) * std::log1p(r);
  }

  double inverse(double c) const override {
    if (!(c > 0.0) || c > 1.0)
      throw LevelOutOfRange("ParetoGenerator: inverse argument outside (0, 1]");
    return std::pow(c, -1.0 / (lambda_ + d_)) - 1.0;
  }

  Variation variation() const override {
    return Regular{lambda_, -(lambda_ + d_)};
  }

  double radial_tail_mass(double R, int d) const override {
    // expand s^{d-1} = ((1+s) - 1)^{d-1} binomially; each term integrates
    // in closed form against (1+s)^{-(lambda+d_)}
    double sum = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= d - 1; ++j) {
      if (j > 0) binom = binom * (d - j) / j;
      double sign = ((d - 1 - j) % 2 == 0) ? 1.0 : -1.0;
      double expo = j - lambda_ - d_ + 1.0;  // < 0 because lambda > 0
      sum += sign * binom * std::pow(1.0 + R, expo) / (-expo);
    }
    return sum;
  }

  double integrand_peak(int d) const override {
    return (d - 1) / (lambda_ + 1.0);
  }

  std::string label() const override {
    return "pareto(lambda=" + std::to_string(lambda_) +
           ",d=" + std::to_string(d_) + ")";
  }

  double lambda() const { return lambda_; }

 private:
  double lambda_;
  int d_;
};

// Integral of s^{d-1} f0(s) over [0, infinity): adaptive quadrature up to
// the radius where the integrand has fallen to quad_tol times its peak,
// plus the exact tail mass beyond it. The exact tail matters for the
// regularly varying profiles, whose truncated tail is far larger than
// quad_tol would suggest.
inline double radial_profile_integral(const Generator& gen, int d,
                                      double quad_tol) {
  if (!(quad_tol > 0.0))
    throw std::invalid_argument("radial_profile_integral: quad_tol <= 0");
  auto integrand = [&](double s) {
    return s > 0.0 ? std::exp((d - 1) * std::log(s) + gen.log_eval(s))
                   : (d == 1 ? gen.eval(0.0) : 0.0);
  };
  double s_peak = gen.integrand_peak(d);
  double peak = integrand(std::max(s_peak, 1e-12));
  double r_star = std::max(2.0 * s_peak, 1.0);
  int doublings = 0;
  while (integrand(r_star) > quad_tol * peak) {
    r_star *= 2.0;
    if (++doublings > 200)
      throw DivergentIntegral("radial_profile_integral: no truncation radius");
  }
  // the exact total mass calibrates the absolute tolerance; the value
  // itself still comes from the quadrature plus the truncated tail
  double total = gen.radial_tail_mass(0.0, d);
  if (!(total > 0.0) || !std::isfinite(total))
    throw DivergentIntegral("radial_profile_integral: profile not integrable");
  double body = integrate(integrand, 0.0, r_star, 0.5 * quad_tol * total, 52);
  return body + gen.radial_tail_mass(r_star, d);
}

// c such that c * f0(gauge(x)) integrates to one: 1 / (d |D| I) with
// I the radial profile integral. vol is the caller's estimate of |D|.
inline double normalizing_constant(const StarShape& shape, const Generator& gen,
                                   double quad_tol, double vol) {
  if (!(vol > 0.0))
    throw std::invalid_argument("normalizing_constant: volume must be positive");
  double I = radial_profile_integral(gen, shape.dim(), quad_tol);
  return 1.0 / (shape.dim() * vol * I);
}

// Radius r with {c_norm f0(gauge) > level} = r D.
inline double level_radius(const Generator& gen, double c_norm, double level) {
  if (!(c_norm > 0.0))
    throw std::invalid_argument("level_radius: c_norm must be positive");
  double top = c_norm * gen.eval(0.0);
  if (!(level > 0.0) || !(level < top))
    throw LevelOutOfRange("level_radius: level outside (0, c_norm * f0(0))");
  return gen.inverse(level / c_norm);
}

// Largest root of n s^d f0(s) = 1. Only meaningful for rapidly varying
// profiles; the map rises to a single peak and then decays faster than any
// power, so the largest root sits on the decaying branch. c_norm is accepted
// for interface uniformity; the root equation itself is normalization-free.
inline double scaling_constant(const StarShape& shape, const Generator& gen,
                               double c_norm, std::size_t n) {
  if (!gen.rapid())
    throw HeavyTailUnsupported(
        "scaling_constant: regularly varying profiles have no light-tail scale");
  if (n < 2) throw std::invalid_argument("scaling_constant: n must be >= 2");
  if (!(c_norm > 0.0))
    throw std::invalid_argument("scaling_constant: c_norm must be positive");
  const int d = shape.dim();
  const Rapid tag = std::get<Rapid>(gen.variation());
  auto g = [&](double s) {
    return std::log(static_cast<double>(n)) + d * std::log(s) + gen.log_eval(s);
  };
  double s_peak = tag.kappa * std::pow(d / tag.theta, 1.0 / tag.theta);
  if (g(s_peak) < 0.0)
    throw NoRoot("scaling_constant: n s^d f0(s) stays below 1");
  double lo = s_peak, hi = 2.0 * s_peak;
  int doublings = 0;
  while (g(hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200)
      throw NoRoot("scaling_constant: decaying branch not reached");
  }
  double u = bisect([&](double v) { return g(std::exp(v)); }, std::log(lo),
                    std::log(hi), 1e-15, 300);
  double s_n = std::exp(u);
  if (std::fabs(std::exp(g(s_n)) - 1.0) > 1e-10)
    throw ToleranceNotReached("scaling_constant: residual above 1e-10");
  return s_n;
}

// Ratio sequence f0(t x)/f0(t) along a grid of t values; tests use it to
// confirm the tagged variation class.
inline std::vector<double> empirical_variation_ratio(
    const Generator& gen, double x, const std::vector<double>& t_grid) {
  if (!(x > 0.0) || x == 1.0)
    throw std::invalid_argument("empirical_variation_ratio: need x > 0, x != 1");
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid)
    out.push_back(std::exp(gen.log_eval(t * x) - gen.log_eval(t)));
  return out;
}

}  // namespace starshape
