#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace uforest::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

/// Bare-bones line chart; enough to eyeball a figure without a plotting stack.
struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_x = false;

  std::string render(double width = 640, double height = 420) const;
};

namespace detail {

inline std::string num(double v, int digits = 2) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  return {buf.data(), res.ptr};
}

inline std::string tick(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
  return {buf.data(), res.ptr};
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

inline constexpr std::array<const char*, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace detail

inline std::string LinePlot::render(double width, double height) const {
  const double left = 70, right = 150, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string o = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width, 0) + "\" height=\"" +
                  detail::num(height, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + detail::num(left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       detail::escape(title) + "</text>\n";
  o += "<rect x=\"" + detail::num(left) + "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(pw) + "\" height=\"" +
       detail::num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0, yv = y0 + (y1 - y0) * t / 4.0;
    const double xs = left + pw * t / 4.0, ys = top + ph * (1.0 - t / 4.0);
    o += "<text x=\"" + detail::num(xs) + "\" y=\"" + detail::num(top + ph + 16) + "\" text-anchor=\"middle\">" +
         detail::tick(log_x ? std::pow(10.0, xv) : xv) + "</text>\n";
    o += "<text x=\"" + detail::num(left - 6) + "\" y=\"" + detail::num(ys + 4) + "\" text-anchor=\"end\">" + detail::tick(yv) +
         "</text>\n";
  }
  o += "<text x=\"" + detail::num(left + pw / 2) + "\" y=\"" + detail::num(height - 10) + "\" text-anchor=\"middle\">" +
       detail::escape(x_label) + "</text>\n";
  o += "<text transform=\"translate(16," + detail::num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       detail::escape(y_label) + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = detail::kColors[k % detail::kColors.size()];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i])) + " ";
      if (s.markers)
        o += "<circle cx=\"" + detail::num(px(s.x[i])) + "\" cy=\"" + detail::num(py(s.y[i])) + "\" r=\"2.5\" fill=\"" + color +
             "\"/>\n";
    }
    o += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    o += "<line x1=\"" + detail::num(left + pw + 10) + "\" y1=\"" + detail::num(ly) + "\" x2=\"" + detail::num(left + pw + 30) +
         "\" y2=\"" + detail::num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    o += "<text x=\"" + detail::num(left + pw + 35) + "\" y=\"" + detail::num(ly + 4) + "\">" + detail::escape(s.name) +
         "</text>\n";
  }
  return o + "</svg>\n";
}

}  // namespace uforest::svg
