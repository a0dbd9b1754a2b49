#include "synclab/harness/svg.hpp"

#include "synclab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace synclab::harness {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;
constexpr std::size_t kMaxBuckets = 1500;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
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

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

const char* dash(LineStyle s) {
  switch (s) {
    case LineStyle::Solid: return "";
    case LineStyle::Dashed: return " stroke-dasharray=\"8,5\"";
    case LineStyle::Dotted: return " stroke-dasharray=\"2,4\"";
  }
  return "";
}

const char* colour(std::size_t i) {
  static const char* palette[] = {"#1f4e9c", "#c0392b", "#27853f", "#8e44ad", "#d68910"};
  return palette[i % 5];
}

/// Keeps the first, min, max and last point of each x bucket so dense
/// switching bands survive the reduction.
std::vector<std::pair<double, double>> reduce(const Series& s, double x0, double x1) {
  std::vector<std::pair<double, double>> pts;
  const std::size_t n = std::min(s.x.size(), s.y.size());
  if (n <= 4 * kMaxBuckets) {
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(s.x[i], s.y[i]);
    return pts;
  }
  const double width = (x1 - x0) / kMaxBuckets;
  std::size_t i = 0;
  while (i < n) {
    const auto bucket = static_cast<long>(std::floor((s.x[i] - x0) / width));
    std::size_t j = i;
    std::size_t lo = i;
    std::size_t hi = i;
    while (j < n && static_cast<long>(std::floor((s.x[j] - x0) / width)) == bucket) {
      if (s.y[j] < s.y[lo]) lo = j;
      if (s.y[j] > s.y[hi]) hi = j;
      ++j;
    }
    std::vector<std::size_t> keep{i, lo, hi, j - 1};
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (std::size_t k : keep) pts.emplace_back(s.x[k], s.y[k]);
    i = j;
  }
  return pts;
}

void render_panel(std::string& out, const Panel& p, double top, int width, int height) {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax - xmin <= 0.0) xmax = xmin + 1.0;
  if (ymax - ymin <= 0.0) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double left = kMarginLeft;
  const double right = width - kMarginRight;
  const double ptop = top + kMarginTop;
  const double bottom = top + height - kMarginBottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto sy = [&](double y) { return bottom - (y - ymin) / (ymax - ymin) * (bottom - ptop); };

  out += "<text x=\"" + num(width / 2.0) + "\" y=\"" + num(top + 20) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + escape(p.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(ptop) + "\" width=\"" + num(right - left) + "\" height=\"" +
         num(bottom - ptop) + "\" fill=\"none\" stroke=\"#000\"/>\n";

  const double xs = nice_step(xmax - xmin, 8);
  for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9 * xs; v += xs) {
    out += "<line x1=\"" + num(sx(v)) + "\" y1=\"" + num(bottom) + "\" x2=\"" + num(sx(v)) + "\" y2=\"" +
           num(bottom + 5) + "\" stroke=\"#000\"/>";
    out += "<text x=\"" + num(sx(v)) + "\" y=\"" + num(bottom + 18) + "\" text-anchor=\"middle\" font-size=\"11\">" +
           tick_label(v) + "</text>\n";
  }
  const double ys = nice_step(ymax - ymin, 6);
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9 * ys; v += ys) {
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" + num(left) + "\" y2=\"" +
           num(sy(v)) + "\" stroke=\"#000\"/>";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(v) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
           tick_label(v) + "</text>\n";
  }
  out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(bottom + 34) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(p.x_label) + "</text>\n";
  if (!p.y_label.empty()) {
    out += "<text x=\"14\" y=\"" + num((ptop + bottom) / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " +
           num((ptop + bottom) / 2) + ")\" text-anchor=\"middle\">" + escape(p.y_label) + "</text>\n";
  }

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour(k)) + "\" stroke-width=\"1.2\"" + dash(s.style) +
           " points=\"";
    for (const auto& [x, y] : reduce(s, xmin, xmax)) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out += num(sx(x)) + "," + num(sy(y)) + " ";
    }
    out += "\"/>\n";
    const double ly = ptop + 16 + 16 * static_cast<double>(k);
    out += "<line x1=\"" + num(right - 150) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(right - 120) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + colour(k) + "\" stroke-width=\"1.5\"" + dash(s.style) + "/>";
    out += "<text x=\"" + num(right - 114) + "\" y=\"" + num(ly + 4) + "\" font-size=\"11\">" + escape(s.label) +
           "</text>\n";
  }
}

}  // namespace

std::string render_svg(const Figure& figure) {
  const int height = figure.panel_height * static_cast<int>(std::max<std::size_t>(1, figure.panels.size())) + 30;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(figure.width) +
                    "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  out += "<text x=\"" + num(figure.width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">" +
         escape(figure.title) + "</text>\n";
  for (std::size_t i = 0; i < figure.panels.size(); ++i) {
    render_panel(out, figure.panels[i], 30.0 + static_cast<double>(i) * figure.panel_height, figure.width,
                 figure.panel_height);
  }
  out += "</svg>\n";
  return out;
}

void write_svg(const std::filesystem::path& path, const Figure& figure) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  out << render_svg(figure);
}

}  // namespace synclab::harness
