#include "vipr_cli/report.hpp"

#include <cstdio>
#include <fstream>

#include "vipr/error.hpp"

namespace vipr::cli {
namespace {

constexpr double kW = 480, kH = 400;
constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 56;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

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

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double px(double x) { return kLeft + x * (kW - kLeft - kRight); }
double py(double y) { return kH - kBottom - y * (kH - kTop - kBottom); }

std::string header(const std::string& title, double w, double h) {
  std::string s = fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" viewBox=\"0 0 %g %g\">\n", w,
                      h, w, h);
  s += fmt("<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", w, h);
  s += fmt("<text x=\"%g\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">", w / 2) +
       escape(title) + "</text>\n";
  return s;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series, const CurvePoint* marker) {
  std::string s = header(title, kW, kH);
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    s += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#e0e0e0\"/>\n", px(t), py(0), px(t), py(1));
    s += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#e0e0e0\"/>\n", px(0), py(t), px(1), py(t));
    if (i % 2 == 0) {
      s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">%.1f</text>\n",
               px(t), py(0) + 16, t);
      s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">%.1f</text>\n",
               px(0) - 6, py(t) + 4, t);
    }
  }
  s += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"none\" stroke=\"black\"/>\n", px(0), py(1),
           px(1) - px(0), py(0) - py(1));
  s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">", px(0.5),
           kH - 14) +
       escape(x_label) + "</text>\n";
  s += fmt("<text x=\"16\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 16 %.2f)\">",
           py(0.5), py(0.5)) +
       escape(y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (const auto& p : series[k].points) pts += fmt("%.2f,%.2f ", px(p.x), py(p.y));
    s += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" + std::string(color) + "\" points=\"" + pts + "\"/>\n";
    if (series.size() > 1) {
      const double ly = kTop + 8 + 16 * static_cast<double>(k);
      s += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke-width=\"2\" ", px(0.72), ly, px(0.78), ly) +
           "stroke=\"" + color + "\"/>\n";
      s += fmt("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\">", px(0.8), ly + 4) +
           escape(series[k].name) + "</text>\n";
    }
  }
  if (marker) {
    s += fmt("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"black\"/>\n", px(marker->x), py(marker->y));
    s += fmt("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\">%.3f @ %.3f</text>\n",
             px(marker->x) + 6, py(marker->y) - 6, marker->y, marker->x);
  }
  return s + "</svg>\n";
}

std::string svg_confusion(const std::string& title, const ConfusionMatrix& m) {
  const double w = 360, h = 340, x0 = 120, y0 = 60, cell = 110;
  std::string s = header(title, w, h);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double v = m.normalized[r][c];
      const int shade = static_cast<int>(255 - 200 * v);
      char fill[16];
      std::snprintf(fill, sizeof(fill), "#%02x%02xff", shade, shade);
      s += fmt("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" stroke=\"black\" ", x0 + c * cell, y0 + r * cell, cell,
               cell) +
           "fill=\"" + fill + "\"/>\n";
      s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">%.2f</text>\n",
               x0 + c * cell + cell / 2, y0 + r * cell + cell / 2, v);
      s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">n=%g</text>\n",
               x0 + c * cell + cell / 2, y0 + r * cell + cell / 2 + 18, m.counts[r][c]);
    }
    s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">", x0 - 8,
             y0 + r * cell + cell / 2 + 4) +
         escape(m.labels[r]) + "</text>\n";
    s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">",
             x0 + r * cell + cell / 2, y0 + 2 * cell + 18) +
         escape(m.labels[r]) + "</text>\n";
  }
  s += fmt("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">predicted</text>\n",
           x0 + cell, y0 + 2 * cell + 38);
  return s + "</svg>\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
}

}  // namespace vipr::cli
