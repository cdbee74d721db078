#include "covfield/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace covfield {

namespace {

constexpr double kWidth = 640, kHeight = 480, kMargin = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return colors[i % 6];
}

/// Maps [lo,hi] onto the plot area, guarding against a degenerate range.
struct Axis {
  double lo, hi, px0, px1;
  double operator()(double v) const {
    const double span = hi > lo ? hi - lo : 1.0;
    return px0 + (v - lo) / span * (px1 - px0);
  }
};

}  // namespace

std::string svg_loglog(const std::vector<LogLogSeries>& series, const std::string& title) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x and y differ in length");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) throw std::invalid_argument("log-log data must be positive");
      xlo = std::min(xlo, std::log10(s.x[i]));
      xhi = std::max(xhi, std::log10(s.x[i]));
      ylo = std::min(ylo, std::log10(s.y[i]));
      yhi = std::max(yhi, std::log10(s.y[i]));
    }
  }
  if (!std::isfinite(xlo)) xlo = xhi = ylo = yhi = 0;
  const Axis X{std::floor(xlo), std::ceil(xhi), kMargin, kWidth - kMargin};
  const Axis Y{std::floor(ylo), std::ceil(yhi), kHeight - kMargin, kMargin};
  std::ostringstream o;
  o << header();
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"30\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n";
  o << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(kWidth - 2 * kMargin)
    << "\" height=\"" << num(kHeight - 2 * kMargin) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = X.lo; e <= X.hi; e += 1)
    o << "<text x=\"" << num(X(e)) << "\" y=\"" << num(kHeight - kMargin + 18) << "\" text-anchor=\"middle\" font-size=\"11\">1e"
      << static_cast<int>(e) << "</text>\n";
  for (double e = Y.lo; e <= Y.hi; e += 1)
    o << "<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(Y(e) + 4) << "\" text-anchor=\"end\" font-size=\"11\">1e"
      << static_cast<int>(e) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke=\"" << palette(k) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << (i ? " " : "") << num(X(std::log10(s.x[i]))) << "," << num(Y(std::log10(s.y[i])));
    o << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      o << "<circle cx=\"" << num(X(std::log10(s.x[i]))) << "\" cy=\"" << num(Y(std::log10(s.y[i])))
        << "\" r=\"3\" fill=\"" << palette(k) << "\"/>\n";
    o << "<text x=\"" << num(kWidth - kMargin - 4) << "\" y=\"" << num(kMargin + 16 + 14.0 * static_cast<double>(k))
      << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << palette(k) << "\">" << s.name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_dendrogram(const Dendrogram& dg, double cutoff_height) {
  const int n = dg.n_leaves;
  const int nodes = n + static_cast<int>(dg.merges.size());
  // Leaf order from a depth-first walk of the merge tree so branches never cross.
  std::vector<double> xpos(static_cast<std::size_t>(nodes), 0.0), ypos(static_cast<std::size_t>(nodes), 0.0);
  std::vector<int> order;
  if (!dg.merges.empty()) {
    std::vector<int> stack{nodes - 1};
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      if (c < n) {
        order.push_back(c);
        continue;
      }
      const auto& m = dg.merges[static_cast<std::size_t>(c - n)];
      stack.push_back(m.b);
      stack.push_back(m.a);
    }
  } else {
    for (int i = 0; i < n; ++i) order.push_back(i);
  }
  double hmax = 0;
  for (const auto& m : dg.merges) hmax = std::max(hmax, m.height);
  if (cutoff_height > hmax) hmax = cutoff_height;
  const Axis X{0, static_cast<double>(std::max(1, n - 1)), kMargin, kWidth - kMargin};
  const Axis Y{0, hmax, kHeight - kMargin, kMargin};
  for (std::size_t k = 0; k < order.size(); ++k) xpos[static_cast<std::size_t>(order[k])] = X(static_cast<double>(k));
  for (int i = 0; i < n; ++i) ypos[static_cast<std::size_t>(i)] = Y(0);
  std::ostringstream o;
  o << header();
  for (std::size_t k = 0; k < dg.merges.size(); ++k) {
    const auto& m = dg.merges[k];
    const auto id = static_cast<std::size_t>(n) + k;
    const double y = Y(m.height);
    const double xa = xpos[static_cast<std::size_t>(m.a)], xb = xpos[static_cast<std::size_t>(m.b)];
    xpos[id] = 0.5 * (xa + xb);
    ypos[id] = y;
    o << "<path d=\"M" << num(xa) << "," << num(ypos[static_cast<std::size_t>(m.a)]) << " V" << num(y) << " H" << num(xb)
      << " V" << num(ypos[static_cast<std::size_t>(m.b)]) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
  }
  if (cutoff_height >= 0)
    o << "<line x1=\"" << num(kMargin) << "\" x2=\"" << num(kWidth - kMargin) << "\" y1=\"" << num(Y(cutoff_height))
      << "\" y2=\"" << num(Y(cutoff_height)) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  o << "</svg>\n";
  return o.str();
}

Glyph tensor_glyph(const CovTensor& t, double scale) {
  if (t.rows() != 2 || t.cols() != 2) throw std::invalid_argument("glyphs are drawn for 2×2 tensors");
  const auto s = spectrum(t);
  Glyph g;
  g.major = scale * std::sqrt(std::max(0.0, s.eigenvalues[1]));
  g.minor = scale * std::sqrt(std::max(0.0, s.eigenvalues[0]));
  g.angle_deg = std::atan2(s.eigenvectors(1, 1), s.eigenvectors(0, 1)) * 180.0 / std::numbers::pi;
  return g;
}

namespace {

struct Bounds {
  double xlo, xhi, ylo, yhi;
};

Bounds bounds_of(const std::vector<Point>& pts) {
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    if (p.size() != 2) throw std::invalid_argument("plots need planar query points");
    b.xlo = std::min(b.xlo, p[0]);
    b.xhi = std::max(b.xhi, p[0]);
    b.ylo = std::min(b.ylo, p[1]);
    b.yhi = std::max(b.yhi, p[1]);
  }
  if (pts.empty()) b = {0, 1, 0, 1};
  return b;
}

}  // namespace

std::string svg_tensor_glyphs(const FieldGrid& field, double glyph_scale) {
  const Bounds b = bounds_of(field.query_points);
  const double side = std::min(kWidth, kHeight) - 2 * kMargin;
  const double span = std::max({b.xhi - b.xlo, b.yhi - b.ylo, 1e-12});
  const double px = side / span;
  double top = 0;
  for (const auto& t : field.tensors) top = std::max(top, spectrum(t).eigenvalues[1]);
  // Largest glyph spans about half a grid cell by default.
  const double cells = std::max(1.0, std::sqrt(static_cast<double>(field.query_points.size())) - 1.0);
  const double unit = top > 0 ? glyph_scale * 0.45 * side / cells / std::sqrt(top) : 0.0;
  std::ostringstream o;
  o << header();
  for (std::size_t q = 0; q < field.query_points.size(); ++q) {
    const Glyph g = tensor_glyph(field.tensors[q], unit);
    const double cx = kMargin + (field.query_points[q][0] - b.xlo) * px;
    const double cy = kHeight - kMargin - (field.query_points[q][1] - b.ylo) * px;
    o << "<ellipse cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" rx=\"" << num(g.major) << "\" ry=\"" << num(g.minor)
      << "\" transform=\"rotate(" << num(-g.angle_deg) << " " << num(cx) << " " << num(cy)
      << ")\" fill=\"#1f77b4\" fill-opacity=\"0.5\" stroke=\"#1f77b4\" stroke-width=\"0.5\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_field_heatmap(const FieldGrid& field, int nx, int ny) {
  if (nx < 1 || ny < 1 || static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) != field.query_points.size())
    throw std::invalid_argument("heat map dimensions do not match the grid");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : field.frechet_values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double cw = (kWidth - 2 * kMargin) / nx, ch = (kHeight - 2 * kMargin) / ny;
  std::ostringstream o;
  o << header();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double v = field.frechet_values[static_cast<std::size_t>(iy * nx + ix)];
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.0;
      const int r = static_cast<int>(std::lround(255 * t)), bl = static_cast<int>(std::lround(255 * (1 - t)));
      char color[8];
      std::snprintf(color, sizeof color, "#%02x40%02x", r, bl);
      o << "<rect x=\"" << num(kMargin + ix * cw) << "\" y=\"" << num(kHeight - kMargin - (iy + 1) * ch) << "\" width=\""
        << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << color << "\"/>\n";
    }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace covfield
