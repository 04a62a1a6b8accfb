#include "ptsol/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ptsol/error.hpp"

namespace ptsol {
namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 72, kRight = 150, kTop = 40, kBottom = 56;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  if (std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1-2-5 tick spacing giving roughly `target` intervals.
std::vector<double> ticks(double lo, double hi, int target = 6) {
  std::vector<double> out;
  const double span = hi - lo;
  if (!(span > 0)) return out;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::scatter(const std::string& name, const std::string& color, const Points& points,
                      double radius) {
  series_.push_back({name, color, points, false, false, radius});
}

void SvgPlot::line(const std::string& name, const std::string& color, const Points& points,
                   bool dashed) {
  series_.push_back({name, color, points, true, dashed, 0.0});
}

void SvgPlot::set_range(double x0, double x1, double y0, double y1) {
  fixed_range_ = true;
  x0_ = x0;
  x1_ = x1;
  y0_ = y0;
  y1_ = y1;
}

std::string SvgPlot::render() const {
  auto ty = [&](double y) { return log_y_ ? std::log10(y) : y; };
  auto usable = [&](const std::pair<double, double>& p) {
    return std::isfinite(p.first) && std::isfinite(p.second) && (!log_y_ || p.second > 0);
  };

  double x0 = x0_, x1 = x1_, y0 = y0_, y1 = y1_;
  if (fixed_range_) {
    if (log_y_) {
      y0 = std::log10(y0);
      y1 = std::log10(y1);
    }
  } else {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -std::numeric_limits<double>::infinity();
    for (const Series& s : series_) {
      for (const auto& p : s.points) {
        if (!usable(p)) continue;
        x0 = std::min(x0, p.first);
        x1 = std::max(x1, p.first);
        y0 = std::min(y0, ty(p.second));
        y1 = std::max(y1, ty(p.second));
      }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    const double px = std::max(x1 - x0, 1e-3) * 0.05, py = std::max(y1 - y0, 1e-3) * 0.05;
    if (x1 - x0 < 1e-3) x0 -= 0.5e-3, x1 += 0.5e-3;
    if (y1 - y0 < 1e-3) y0 -= 0.5e-3, y1 += 0.5e-3;
    x0 -= px, x1 += px, y0 -= py, y1 += py;
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };
  auto inside = [&](const std::pair<double, double>& p) {
    return usable(p) && p.first >= x0 && p.first <= x1 && ty(p.second) >= y0 && ty(p.second) <= y1;
  };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title_) << "</text>\n";

  // Grid and ticks.
  for (double t : ticks(x0, x1)) {
    o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(sx(t))
      << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
  }
  for (double t : ticks(y0, y1)) {
    const double ypix = kTop + (1.0 - (t - y0) / (y1 - y0)) * ph;
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(ypix) << "\" x2=\"" << num(kLeft + pw)
      << "\" y2=\"" << num(ypix) << "\" stroke=\"#e0e0e0\"/>\n"
      << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(ypix + 4) << "\" text-anchor=\"end\">"
      << (log_y_ ? "1e" + label(t) : label(t)) << "</text>\n";
  }
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 14)
    << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n"
    << "<text transform=\"translate(18," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label_) << "</text>\n";

  o << "<clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
    << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
  for (const Series& s : series_) {
    if (s.is_line) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
      bool first = true;
      for (const auto& p : s.points) {
        if (!usable(p)) continue;
        o << (first ? "" : " ") << num(sx(p.first)) << "," << num(sy(p.second));
        first = false;
      }
      o << "\"/>\n";
    } else {
      for (const auto& p : s.points) {
        if (!inside(p)) continue;
        o << "<circle cx=\"" << num(sx(p.first)) << "\" cy=\"" << num(sy(p.second)) << "\" r=\""
          << num(s.radius) << "\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }
  o << "</g>\n";

  // Legend.
  double ly = kTop + 10;
  for (const Series& s : series_) {
    if (s.name.empty()) continue;
    const double lx = kLeft + pw + 12;
    if (s.is_line) {
      o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 18)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    } else {
      o << "<circle cx=\"" << num(lx + 9) << "\" cy=\"" << num(ly) << "\" r=\"3\" fill=\"" << s.color
        << "\"/>\n";
    }
    o << "<text x=\"" << num(lx + 24) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.name)
      << "</text>\n";
    ly += 18;
  }
  o << "</svg>\n";
  return o.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << render();
}

}  // namespace ptsol
