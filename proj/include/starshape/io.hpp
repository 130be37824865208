// Deterministic artifact emitters: CSV with round-trip doubles and a
// fixed-viewport SVG scatter canvas. Both write LF line endings only.
#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "starshape/vec.hpp"

namespace starshape {

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& header,
                      const Matrix& m) {
  for (std::size_t j = 0; j < header.size(); ++j)
    os << (j ? "," : "") << header[j];
  os << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* p = m.row(i);
    for (int j = 0; j < m.cols(); ++j)
      os << (j ? "," : "") << format_g17(p[j]);
    os << "\n";
  }
}

inline void write_csv_rows(std::ostream& os,
                           const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows) {
  for (std::size_t j = 0; j < header.size(); ++j)
    os << (j ? "," : "") << header[j];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j)
      os << (j ? "," : "") << format_g17(r[j]);
    os << "\n";
  }
}

// 800x800 scatter canvas over a symmetric data window [-w, w]^2. Every
// element carries a caller-chosen id so tests can grab it unambiguously.
class SvgScatter {
 public:
  static constexpr int kSide = 800;
  static constexpr int kMargin = 40;

  explicit SvgScatter(double window) : window_(window) {
    if (!(window > 0.0))
      throw std::invalid_argument("SvgScatter: window must be > 0");
    body_ += "<!-- starshape svg 1 -->\n";
    body_ +=
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
        "height=\"800\" viewBox=\"0 0 800 800\">\n";
    body_ +=
        "<rect width=\"800\" height=\"800\" fill=\"white\" id=\"frame\"/>\n";
  }

  // closed outline, e.g. the limit body boundary
  void polygon(const std::string& id, const std::vector<Vec>& pts,
               const std::string& stroke, double stroke_width,
               bool dashed = false) {
    body_ += "<path id=\"" + id + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(stroke_width) + "\"";
    if (dashed) body_ += " stroke-dasharray=\"6 4\"";
    body_ += " d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body_ += i == 0 ? "M" : "L";
      body_ += num(px(pts[i][0])) + " " + num(py(pts[i][1]));
    }
    body_ += "Z\"/>\n";
  }

  // dot cloud as one group of circles; stride subsamples deterministically
  void dots(const std::string& id, const Matrix& pts, double radius_px,
            const std::string& fill, std::size_t stride = 1) {
    if (stride == 0) stride = 1;
    body_ += "<g id=\"" + id + "\" fill=\"" + fill + "\">\n";
    for (std::size_t i = 0; i < pts.rows(); i += stride) {
      const double* p = pts.row(i);
      circle(p[0], p[1], radius_px);
    }
    body_ += "</g>\n";
  }

  void dots(const std::string& id, const std::vector<Vec>& pts,
            double radius_px, const std::string& fill) {
    body_ += "<g id=\"" + id + "\" fill=\"" + fill + "\">\n";
    for (const Vec& p : pts) circle(p[0], p[1], radius_px);
    body_ += "</g>\n";
  }

  // diagonal cross marker for a single highlighted point
  void cross(const std::string& id, const Vec& p, double arm_px,
             const std::string& stroke) {
    double cx = px(p[0]), cy = py(p[1]);
    body_ += "<g id=\"" + id + "\" stroke=\"" + stroke +
             "\" stroke-width=\"2\">\n";
    body_ += "<line x1=\"" + num(cx - arm_px) + "\" y1=\"" + num(cy - arm_px) +
             "\" x2=\"" + num(cx + arm_px) + "\" y2=\"" + num(cy + arm_px) +
             "\"/>\n";
    body_ += "<line x1=\"" + num(cx - arm_px) + "\" y1=\"" + num(cy + arm_px) +
             "\" x2=\"" + num(cx + arm_px) + "\" y2=\"" + num(cy - arm_px) +
             "\"/>\n";
    body_ += "</g>\n";
  }

  std::string str() const { return body_ + "</svg>\n"; }

  void write(std::ostream& os) const { os << str(); }

 private:
  double px(double x) const {
    double t = (x + window_) / (2.0 * window_);
    return kMargin + t * (kSide - 2 * kMargin);
  }

  // svg y axis points down
  double py(double y) const {
    double t = (y + window_) / (2.0 * window_);
    return kSide - kMargin - t * (kSide - 2 * kMargin);
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  void circle(double x, double y, double r_px) {
    body_ += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) +
             "\" r=\"" + num(r_px) + "\"/>\n";
  }

  double window_;
  std::string body_;
};

}  // namespace starshape
