#include "ctaudit/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ctaudit/error.hpp"

namespace ctaudit {

namespace {

constexpr int kCaptionHeight = 64;
constexpr double kPadding = 0.05;
constexpr double kArrowPx = 12.0;

std::string num(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Frame {
  double x0, y0, w, h;  // viewBox in data units, y already flipped
  double px_w, px_h;

  double sx() const { return px_w / w; }
  double sy() const { return px_h / h; }
};

// Arrowhead built in pixel space and mapped back, so it keeps its shape
// under the non-uniform viewBox scaling.
std::string arrowhead(const Frame& f, double tip_x, double tip_y, double from_x, double from_y) {
  const double dx = (tip_x - from_x) * f.sx();
  const double dy = (tip_y - from_y) * f.sy();
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return {};
  const double ux = dx / len, uy = dy / len;
  const double size = std::min(kArrowPx, len / 2);
  const double bx = -ux * size, by = -uy * size;
  const double wx = -uy * size * 0.4, wy = ux * size * 0.4;
  auto pt = [&](double px, double py) { return num(tip_x + px / f.sx()) + "," + num(tip_y + py / f.sy()); };
  return pt(0, 0) + " " + pt(bx + wx, by + wy) + " " + pt(bx - wx, by - wy);
}

}  // namespace

std::string render_svg(const FigureModel& figure, const SvgOptions& options) {
  if (figure.rect_width == 0 || figure.rect_height == 0) {
    throw ValidationError("determinant figure: rectangle " + figure.rect_width.str() + " x " +
                          figure.rect_height.str() + " has zero area");
  }
  const double W = to_double(figure.rect_width);
  const double H = to_double(figure.rect_height);
  const int plot_h = options.height_px - kCaptionHeight;
  if (options.width_px <= 0 || plot_h <= 0) throw ValidationError("SVG size too small");

  // Data y maps to H - y so the picture has y pointing up.
  const Frame frame{-kPadding * W, -kPadding * H, W * (1 + 2 * kPadding), H * (1 + 2 * kPadding),
                    static_cast<double>(options.width_px), static_cast<double>(plot_h)};
  auto X = [](const BigInt& x) { return to_double(x); };
  auto Y = [H](const BigInt& y) { return H - to_double(y); };

  const auto& v1 = figure.v1;
  const auto& v2 = figure.v2;
  const auto& poly = figure.parallelogram;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width_px << "\" height=\""
      << options.height_px << "\" viewBox=\"0 0 " << options.width_px << " " << options.height_px << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << options.width_px << "\" height=\"" << options.height_px
      << "\" fill=\"white\"/>\n";
  out << "  <svg x=\"0\" y=\"0\" width=\"" << options.width_px << "\" height=\"" << plot_h << "\" viewBox=\""
      << num(frame.x0) << " " << num(frame.y0) << " " << num(frame.w) << " " << num(frame.h)
      << "\" preserveAspectRatio=\"none\">\n";
  out << "    <rect id=\"rectangle\" x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\"/>\n";
  out << "    <polygon id=\"parallelogram\" points=\"";
  for (std::size_t i = 0; i < poly.size(); ++i) out << (i ? " " : "") << num(X(poly[i].x)) << "," << num(Y(poly[i].y));
  out << "\" fill=\"#4a7ab5\" fill-opacity=\"0.35\" stroke=\"#4a7ab5\" stroke-width=\"1\""
         " vector-effect=\"non-scaling-stroke\"/>\n";

  const std::array<std::pair<const Point*, const char*>, 2> arrows{{{&v1, "v1"}, {&v2, "v2"}}};
  for (const auto& [v, id] : arrows) {
    const double tx = X(v->x), ty = Y(v->y);
    out << "    <g id=\"" << id << "\">\n";
    out << "      <line x1=\"0\" y1=\"" << num(H) << "\" x2=\"" << num(tx) << "\" y2=\"" << num(ty)
        << "\" stroke=\"#b53a2e\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>\n";
    const std::string head = arrowhead(frame, tx, ty, 0.0, H);
    if (!head.empty()) out << "      <polygon points=\"" << head << "\" fill=\"#b53a2e\"/>\n";
    out << "    </g>\n";
  }
  out << "  </svg>\n";

  const auto& corr = figure.correlation;
  std::string ratio = "undefined";
  if (figure.area_ratio) ratio = format_sig(to_double(*figure.area_ratio)) + " (" + to_fraction_string(*figure.area_ratio) + ")";
  const std::string row_line = "rows " + figure.row_labels[0] + " = (" + v1.x.str() + ", " + v1.y.str() + "), " +
                               figure.row_labels[1] + " = (" + v2.x.str() + ", " + v2.y.str() + "); axes " +
                               figure.col_labels[0] + " / " + figure.col_labels[1];
  const std::string value_line = "nominal correlation " + format_sig(corr.value) + ", parallelogram/rectangle " + ratio;

  int y = plot_h + 20;
  out << "  <g font-family=\"sans-serif\" font-size=\"13\" fill=\"black\">\n";
  if (!options.title.empty()) {
    out << "    <text x=\"8\" y=\"" << y << "\">" << escape(options.title) << "</text>\n";
    y += 18;
  }
  out << "    <text x=\"8\" y=\"" << y << "\">" << escape(value_line) << "</text>\n";
  y += 18;
  out << "    <text x=\"8\" y=\"" << y << "\" font-size=\"11\">" << escape(row_line) << "</text>\n";
  out << "  </g>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace ctaudit
