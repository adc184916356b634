#include "fairal/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fairal/errors.hpp"

namespace fairal {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  void expand(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // 5% margin each side; degenerate spans get a unit pad.
  void finish() {
    if (hi < lo) { lo = 0.0; hi = 1.0; }
    double span = hi - lo;
    if (span <= 0.0) span = std::abs(hi) > 1.0 ? std::abs(hi) : 1.0;
    lo -= 0.05 * span;
    hi += 0.05 * span;
  }
};

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
  bool any_point = false;
  Range xr, yr;
  bool first = true;
  for (const auto& s : series) {
    if (s.mean.size() != s.x.size() ||
        (!s.band.empty() && s.band.size() != s.x.size())) {
      throw ShapeError("svg plot: series lengths disagree");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double b = s.band.empty() ? 0.0 : s.band[i];
      if (first) {
        xr.lo = xr.hi = s.x[i];
        yr.lo = s.mean[i] - b;
        yr.hi = s.mean[i] + b;
        first = false;
      } else {
        xr.expand(s.x[i]);
        yr.expand(s.mean[i] - b);
        yr.expand(s.mean[i] + b);
      }
      any_point = true;
    }
  }
  xr.finish();
  yr.finish();

  double plot_w = kWidth - kLeft - kRight;
  double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) {
    return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto py = [&](double y) {
    return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::ofstream out(path);
  if (!out) throw IoError("svg plot: cannot open for write: " + path);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape_xml(title) << "</text>\n";

  // Frame and ticks.
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    double gx = px(fx), gy = py(fy);
    out << "<line x1=\"" << num(gx) << "\" y1=\"" << kTop + plot_h
        << "\" x2=\"" << num(gx) << "\" y2=\"" << kTop + plot_h + 5
        << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << num(gx) << "\" y=\"" << kTop + plot_h + 20
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">"
        << num(fx) << "</text>\n";
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(gy) << "\" x2=\""
        << kLeft << "\" y2=\"" << num(gy) << "\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(gy + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"end\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\">"
      << escape_xml(x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">"
      << escape_xml(y_label) << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(*kPalette))];
    if (s.x.empty()) continue;

    if (!s.band.empty() && s.x.size() >= 2) {
      out << "<path fill=\"" << color << "\" fill-opacity=\"0.15\" "
             "stroke=\"none\" d=\"M";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << ' ' << num(px(s.x[i])) << ' ' << num(py(s.mean[i] + s.band[i]));
        if (i == 0) out << " L";
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        out << " L " << num(px(s.x[i])) << ' '
            << num(py(s.mean[i] - s.band[i]));
      }
      out << " Z\"/>\n";
    }

    if (s.x.size() >= 2) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) out << ' ';
        out << num(px(s.x[i])) << ',' << num(py(s.mean[i]));
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\""
          << num(py(s.mean[i])) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }

    double ly = kTop + 16.0 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << num(ly - 4)
        << "\" x2=\"" << kWidth - kRight + 36 << "\" y2=\"" << num(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 42 << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(s.label) << "</text>\n";
  }

  if (!any_point) {
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\""
        << kTop + plot_h / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">no data</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("svg plot: write failed: " + path);
}

}  // namespace fairal
