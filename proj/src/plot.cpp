#include "parlens/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace parlens {

namespace {

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

void render_scatter(const CsvTable& table, const std::string& x_column,
                    const std::string& y_column, const std::string& out_path) {
  auto xs_raw = table.numeric_column(x_column);
  auto ys_raw = table.numeric_column(y_column);

  std::vector<double> xs, ys;
  for (size_t i = 0; i < xs_raw.size(); ++i) {
    if (std::isfinite(xs_raw[i]) && std::isfinite(ys_raw[i])) {
      xs.push_back(xs_raw[i]);
      ys.push_back(ys_raw[i]);
    }
  }
  if (xs.empty()) throw ValidationError("no numeric data to plot");

  double xmin = *std::min_element(xs.begin(), xs.end());
  double xmax = *std::max_element(xs.begin(), xs.end());
  double ymin = *std::min_element(ys.begin(), ys.end());
  double ymax = *std::max_element(ys.begin(), ys.end());
  if (xmin == xmax) { xmin -= 1.0; xmax += 1.0; }
  if (ymin == ymax) { ymin -= 1.0; ymax += 1.0; }
  double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  const double width = 640, height = 480;
  const double left = 64, right = 20, top = 24, bottom = 48;
  auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  // least-squares fit and r, when defined
  const auto n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
  mx /= n; my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  bool has_fit = sxx > 0.0;
  bool has_r = sxx > 0.0 && syy > 0.0;
  double slope = has_fit ? sxy / sxx : 0.0;
  double intercept = my - slope * mx;
  double r = has_r ? sxy / std::sqrt(sxx * syy) : 0.0;

  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write SVG '" + out_path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // axes
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(height - bottom)
      << "\" x2=\"" << num(width - right) << "\" y2=\"" << num(height - bottom)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\""
      << num(left) << "\" y2=\"" << num(height - bottom)
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = xmin + (xmax - xmin) * k / 4.0;
    double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(height - bottom)
        << "\" x2=\"" << num(px(xv)) << "\" y2=\"" << num(height - bottom + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(height - bottom + 18)
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(xv)
        << "</text>\n";
    out << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(py(yv))
        << "\" x2=\"" << num(left) << "\" y2=\"" << num(py(yv))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(py(yv) + 4)
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << num((left + width - right) / 2) << "\" y=\""
      << num(height - 10) << "\" font-size=\"13\" text-anchor=\"middle\">"
      << x_column << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((top + height - bottom) / 2)
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((top + height - bottom) / 2) << ")\">" << y_column << "</text>\n";

  if (has_fit) {
    double y1 = slope * xmin + intercept;
    double y2 = slope * xmax + intercept;
    out << "<line x1=\"" << num(px(xmin)) << "\" y1=\"" << num(py(y1))
        << "\" x2=\"" << num(px(xmax)) << "\" y2=\"" << num(py(y2))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    out << "<circle cx=\"" << num(px(xs[i])) << "\" cy=\"" << num(py(ys[i]))
        << "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.75\"/>\n";
  }
  if (has_r) {
    char label[64];
    std::snprintf(label, sizeof(label), "r = %.4f", r);
    out << "<text x=\"" << num(width - right - 6) << "\" y=\"" << num(top + 14)
        << "\" font-size=\"13\" text-anchor=\"end\">" << label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace parlens
