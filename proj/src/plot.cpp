#include "mfcn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfcn/errors.hpp"

namespace mfcn {

namespace {

constexpr double kWidth = 640, kHeight = 440;
constexpr double kLeft = 72, kRight = 24, kTop = 40, kBottom = 56;

const char* kColors[] = {"#2266bb", "#bb4422", "#228855", "#885599"};

struct LogScale {
  double lo, hi, pix0, pix1;
  double map(double v) const {
    const double t = (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
    return pix0 + t * (pix1 - pix0);
  }
};

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

}  // namespace

std::string svg_loglog_chart(const std::vector<PlotSeries>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label) {
  if (series.empty()) throw ArgumentError("plot needs at least one series");
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    for (double v : s.x) {
      xlo = std::min(xlo, v);
      xhi = std::max(xhi, v);
    }
    auto fold = [&](const std::vector<double>& vals) {
      for (double v : vals) {
        if (v > 0.0 && std::isfinite(v)) {
          ylo = std::min(ylo, v);
          yhi = std::max(yhi, v);
        }
      }
    };
    fold(s.median);
    fold(s.q25);
    fold(s.q75);
  }
  if (!(xlo > 0) || !(ylo > 0) || xlo >= xhi)
    throw ArgumentError("plot needs positive x values and a positive y range");
  if (ylo == yhi) {
    ylo *= 0.5;
    yhi *= 2.0;
  }
  ylo = std::pow(10.0, std::floor(std::log10(ylo)));
  yhi = std::pow(10.0, std::ceil(std::log10(yhi)));

  const LogScale xs{xlo, xhi, kLeft, kWidth - kRight};
  const LogScale ys{ylo, yhi, kHeight - kBottom, kTop};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";

  // Axes frame
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << (kWidth - kLeft - kRight)
      << "\" height=\"" << (kHeight - kTop - kBottom)
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // Decade grid lines + labels on y, series x values as x ticks.
  for (double decade = ylo; decade <= yhi * 1.0001; decade *= 10.0) {
    const double py = ys.map(decade);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << (kWidth - kRight)
        << "\" y2=\"" << py << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << (kLeft - 6) << "\" y=\"" << (py + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(decade) << "</text>\n";
  }
  for (double v : series.front().x) {
    const double px = xs.map(v);
    svg << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px << "\" y2=\""
        << (kHeight - kBottom) << "\" stroke=\"#eee\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << (kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(v) << "</text>\n";
  }
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << (kHeight - 14)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2 << "\" font-size=\"12\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label << "</text>\n";

  int color_idx = 0;
  for (const auto& s : series) {
    const char* color = kColors[color_idx % 4];
    ++color_idx;
    // 25-75% band polygon: forward along q75, back along q25.
    std::ostringstream band;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      band << xs.map(s.x[i]) << ',' << ys.map(std::max(s.q75[i], ylo)) << ' ';
    for (std::size_t i = s.x.size(); i-- > 0;)
      band << xs.map(s.x[i]) << ',' << ys.map(std::max(s.q25[i], ylo)) << ' ';
    svg << "<polygon points=\"" << band.str() << "\" fill=\"#bbbbbb\" fill-opacity=\"0.45\" "
        << "stroke=\"none\"/>\n";
    std::ostringstream line;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      line << xs.map(s.x[i]) << ',' << ys.map(std::max(s.median[i], ylo)) << ' ';
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (kLeft + 10) << "\" y=\"" << (kTop + 16 * color_idx)
        << "\" font-size=\"12\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mfcn
