#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "granreg/errors.hpp"

namespace granreg::tools {

namespace {

constexpr int kWidth = 680;
constexpr int kHeight = 460;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;  // room for the legend
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(std::string name, std::vector<std::pair<double, double>> points) {
  series_.push_back(Series{std::move(name), std::move(points), true});
}

void SvgPlot::add_scatter(std::string name, std::vector<std::pair<double, double>> points) {
  series_.push_back(Series{std::move(name), std::move(points), false});
}

std::string SvgPlot::render() const {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series_) {
    for (const auto& [x, y] : s.points) {
      const double px = log_x_ ? std::log10(x) : x;
      if (first) {
        x_min = x_max = px;
        y_min = y_max = y;
        first = false;
      } else {
        x_min = std::min(x_min, px);
        x_max = std::max(x_max, px);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double x_pad = 0.04 * (x_max - x_min);
  const double y_pad = 0.06 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto to_px = [&](double x) {
    const double v = log_x_ ? std::log10(x) : x;
    return kMarginLeft + (v - x_min) / (x_max - x_min) * plot_w;
  };
  const auto to_py = [&](double y) {
    return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

  // frame
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // ticks: 5 per axis
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double px = kMarginLeft + plot_w * t / 4.0;
    const double label = log_x_ ? std::pow(10.0, fx) : fx;
    svg << "<line x1=\"" << px << "\" y1=\"" << kMarginTop + plot_h << "\" x2=\"" << px
        << "\" y2=\"" << kMarginTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << kMarginTop + plot_h + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(label) << "</text>\n";

    const double fy = y_min + (y_max - y_min) * t / 4.0;
    const double py = kMarginTop + plot_h - plot_h * t / 4.0;
    svg << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << py << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label_ << (log_x_ ? " (log scale)" : "") << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << kMarginTop + plot_h / 2 << ")\">" << y_label_
      << "</text>\n";

  for (std::size_t si = 0; si < series_.size(); ++si) {
    const auto& s = series_[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (s.line && s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& [x, y] : s.points) svg << fmt(to_px(x)) << ',' << fmt(to_py(y)) << ' ';
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << fmt(to_px(x)) << "\" cy=\"" << fmt(to_py(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    // legend entry
    const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(si);
    svg << "<rect x=\"" << kWidth - kMarginRight + 14 << "\" y=\"" << ly - 9
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kWidth - kMarginRight + 30 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << render();
}

}  // namespace granreg::tools
