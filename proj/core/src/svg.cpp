#include "bnet/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bnet {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr int kTicks = 5;

constexpr std::array<const char*, 6> kStrokes = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#17becf"};

struct Range {
  double lo;
  double hi;
};

// Data range widened by 5% on each side; a flat range gets a unit-scale pad.
Range padded(double lo, double hi) {
  if (hi > lo) {
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
  }
  const double pad = 0.05 * std::max(1.0, std::abs(lo));
  return {lo - pad, hi + pad};
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotLabels& labels) {
  if (series.empty()) throw std::invalid_argument("render_svg: no series");
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : series) {
    if (s.times.empty() || s.times.size() != s.values.size()) {
      throw std::invalid_argument(fmt::format("render_svg: series '{}' is empty or ragged", s.label));
    }
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      if (!std::isfinite(s.times[k]) || !std::isfinite(s.values[k])) {
        throw std::invalid_argument(fmt::format("render_svg: non-finite point in '{}'", s.label));
      }
      x_lo = std::min(x_lo, s.times[k]);
      x_hi = std::max(x_hi, s.times[k]);
      y_lo = std::min(y_lo, s.values[k]);
      y_hi = std::max(y_hi, s.values[k]);
    }
  }
  const Range xr = padded(x_lo, x_hi);
  const Range yr = padded(y_lo, y_hi);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth,
                     kHeight);
  out += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);

  out += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int k = 0; k <= kTicks; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * k / kTicks;
    const double X = px(fx);
    const double Y = py(fy);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", X,
        kTop + ph, kTop + ph + 5);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.3g}</text>\n", X,
                       kTop + ph + 18, fx);
    out += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
        kLeft - 5, Y, kLeft);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n",
                       kLeft - 8, Y + 4, fy);
  }
  if (!labels.title.empty()) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kWidth / 2, escape(labels.title));
  }
  if (!labels.x_axis.empty()) {
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + pw / 2, kHeight - 10, escape(labels.x_axis));
  }
  if (!labels.y_axis.empty()) {
    out += fmt::format(
        "<text x=\"16\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2f})\">{1}</text>\n",
        kTop + ph / 2, escape(labels.y_axis));
  }
  out += "</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"",
                       kStrokes[s % kStrokes.size()]);
    for (std::size_t k = 0; k < ser.times.size(); ++k) {
      if (k > 0) out += ' ';
      out += fmt::format("{:.2f},{:.2f}", px(ser.times[k]), py(ser.values[k]));
    }
    out += "\"/>\n";
  }

  out += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  const double lx = kLeft + pw - 150;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = kTop + 16 + 18 * static_cast<double>(s);
    out += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"3\"/>\n",
        lx, ly, lx + 24, ly, kStrokes[s % kStrokes.size()]);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 30, ly + 4,
                       escape(series[s].label));
  }
  out += "</g>\n</svg>\n";
  return out;
}

void emit_svg(const std::vector<Series>& series, const std::filesystem::path& path,
              const PlotLabels& labels) {
  write_file(path, render_svg(series, labels));
}

}  // namespace bnet
