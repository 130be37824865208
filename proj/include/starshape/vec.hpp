// Small fixed-capacity vector and matrix types used throughout the library.
// Dimensions are tiny (d <= 8), so everything lives on the stack.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace starshape {

inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() : n_(0) { x_.fill(0.0); }
  explicit Vec(int n, double fill = 0.0) : n_(n) {
    if (n < 0 || n > kMaxDim) throw std::invalid_argument("Vec: bad dimension");
    x_.fill(0.0);
    for (int i = 0; i < n; ++i) x_[i] = fill;
  }
  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    if (n_ > kMaxDim) throw std::invalid_argument("Vec: bad dimension");
    x_.fill(0.0);
    int i = 0;
    for (double v : xs) x_[i++] = v;
  }

  int size() const { return n_; }
  double& operator[](int i) { return x_[i]; }
  double operator[](int i) const { return x_[i]; }
  const double* data() const { return x_.data(); }
  double* data() { return x_.data(); }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) x_[i] += o.x_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) x_[i] -= o.x_[i];
    return *this;
  }
  Vec& operator*=(double t) {
    for (int i = 0; i < n_; ++i) x_[i] *= t;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double t, Vec a) { return a *= t; }
  friend Vec operator*(Vec a, double t) { return a *= t; }
  friend Vec operator/(Vec a, double t) {
    for (int i = 0; i < a.n_; ++i) a.x_[i] /= t;
    return a;
  }

 private:
  std::array<double, kMaxDim> x_;
  int n_;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

// Per-coordinate interval [lo_i, hi_i].
struct Box {
  Vec lo, hi;
  int dim() const { return lo.size(); }
  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
    return v;
  }
  double width(int i) const { return hi[i] - lo[i]; }
  // Largest coordinate magnitude over the box; the gauge lower bound uses it.
  double bounding_radius() const {
    double r = 0.0;
    for (int i = 0; i < dim(); ++i)
      r = std::max(r, std::max(std::fabs(lo[i]), std::fabs(hi[i])));
    return r;
  }
  Box scaled(double t) const { return Box{t * lo, t * hi}; }
};

// Row-major n x d point matrix; the bulk sample container.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, int cols)
      : data_(rows * static_cast<std::size_t>(cols)), rows_(rows), cols_(cols) {}

  std::size_t rows() const { return rows_; }
  int cols() const { return cols_; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  double operator()(std::size_t i, int j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, int j) { return data_[i * cols_ + j]; }

  Vec point(std::size_t i) const {
    Vec v(cols_);
    for (int j = 0; j < cols_; ++j) v[j] = data_[i * cols_ + j];
    return v;
  }
  void set_point(std::size_t i, const Vec& v) {
    for (int j = 0; j < cols_; ++j) data_[i * cols_ + j] = v[j];
  }

  const std::vector<double>& storage() const { return data_; }

 private:
  std::vector<double> data_;
  std::size_t rows_;
  int cols_;
};

// In-place Gaussian elimination with partial pivoting on an n x n row-major
// system; b is overwritten with the solution. Returns false when singular.
// Sized for facet-intersection solves, not general linear algebra.
inline bool solve_linear(double* a, double* b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    if (std::fabs(a[piv * n + col]) < 1e-13) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int c = row + 1; c < n; ++c) s -= a[row * n + c] * b[c];
    b[row] = s / a[row * n + row];
  }
  return true;
}

// Dense symmetric positive-definite matrix helpers for d <= kMaxDim.
// Stored row-major in a fixed array; enough linear algebra for gauges.
class SmallSpd {
 public:
  SmallSpd() : n_(0) {}
  SmallSpd(int n, const std::vector<double>& row_major) : n_(n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("SmallSpd: bad dimension");
    if (row_major.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("SmallSpd: element count mismatch");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a_[i][j] = row_major[static_cast<std::size_t>(i) * n + j];
        if (std::fabs(a_[i][j] - row_major[static_cast<std::size_t>(j) * n + i]) >
            1e-12 * (1.0 + std::fabs(a_[i][j])))
          throw std::invalid_argument("SmallSpd: matrix not symmetric");
      }
    factor();
  }

  int dim() const { return n_; }
  double operator()(int i, int j) const { return a_[i][j]; }

  // Cholesky factor L with A = L L^T; lower triangle.
  double chol(int i, int j) const { return l_[i][j]; }

  double det() const {
    double d = 1.0;
    for (int i = 0; i < n_; ++i) d *= l_[i][i] * l_[i][i];
    return d;
  }

  // Solves A y = x.
  Vec solve(const Vec& x) const {
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {  // forward: L z = x
      double s = x[i];
      for (int j = 0; j < i; ++j) s -= l_[i][j] * y[j];
      y[i] = s / l_[i][i];
    }
    for (int i = n_ - 1; i >= 0; --i) {  // backward: L^T y = z
      double s = y[i];
      for (int j = i + 1; j < n_; ++j) s -= l_[j][i] * y[j];
      y[i] = s / l_[i][i];
    }
    return y;
  }

  double quadratic_form_inv(const Vec& x) const { return dot(x, solve(x)); }

  // y = L x, maps iid standard normals to N(0, A).
  Vec apply_chol(const Vec& x) const {
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j <= i; ++j) s += l_[i][j] * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  void factor() {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = a_[i][j];
        for (int k = 0; k < j; ++k) s -= l_[i][k] * l_[j][k];
        if (i == j) {
          if (s <= 0.0) throw std::invalid_argument("SmallSpd: matrix not positive definite");
          l_[i][i] = std::sqrt(s);
        } else {
          l_[i][j] = s / l_[j][j];
        }
      }
  }

  double a_[kMaxDim][kMaxDim] = {};
  double l_[kMaxDim][kMaxDim] = {};
  int n_;
};

}  // namespace starshape
