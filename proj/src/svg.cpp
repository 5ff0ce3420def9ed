#include "irtsmooth/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace irtsmooth::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string dash(bool dashed)
{
  return dashed ? " stroke-dasharray=\"6 4\"" : "";
}

double nice_step(double span, int target)
{
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

std::string tick_label(double v, double step)
{
  const int decimals =
    std::clamp(static_cast<int>(-std::floor(std::log10(step))), 0, 6);
  std::array<char, 64> buf{};
  if (std::abs(v) < step * 1e-9)
    v = 0.0;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::fixed, decimals);
  return { buf.data(), ptr };
}

std::pair<double, double> pad_range(double lo, double hi)
{
  if (!(hi > lo)) {
    const double d = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
    return { lo - d, hi + d };
  }
  return { lo, hi };
}

} // namespace

std::string number(double value)
{
  if (!std::isfinite(value))
    return "NA";
  if (value == 0.0)
    value = 0.0;
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, 6);
  std::string out(buf.data(), ptr);
  if (out == "-0.000000")
    out = "0.000000";
  return out;
}

std::string escape(std::string_view text)
{
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string palette(std::size_t index)
{
  static constexpr std::array<const char*, 10> colors = {
    "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000"
  };
  return colors[index % colors.size()];
}

Document::Document(double width, double height)
  : width_(width)
  , height_(height)
{
}

void Document::line(double x1, double y1, double x2, double y2,
                    std::string_view color, double width, bool dashed)
{
  body_ += "<line x1=\"" + number(x1) + "\" y1=\"" + number(y1) + "\" x2=\"" +
           number(x2) + "\" y2=\"" + number(y2) + "\" stroke=\"" +
           std::string(color) + "\" stroke-width=\"" + number(width) + "\"" +
           dash(dashed) + "/>\n";
}

void Document::polyline(std::span<const std::pair<double, double>> points,
                        std::string_view color, double width, bool dashed)
{
  body_ += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"" + number(width) + "\"" + dash(dashed) +
           " points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i)
      body_ += ' ';
    body_ += number(points[i].first) + "," + number(points[i].second);
  }
  body_ += "\"/>\n";
}

void Document::polygon(std::span<const std::pair<double, double>> points,
                       std::string_view fill, double opacity)
{
  body_ += "<polygon fill=\"" + std::string(fill) + "\" fill-opacity=\"" +
           number(opacity) + "\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i)
      body_ += ' ';
    body_ += number(points[i].first) + "," + number(points[i].second);
  }
  body_ += "\"/>\n";
}

void Document::circle(double x, double y, double r, std::string_view fill)
{
  body_ += "<circle cx=\"" + number(x) + "\" cy=\"" + number(y) + "\" r=\"" +
           number(r) + "\" fill=\"" + std::string(fill) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content,
                    std::string_view anchor, double size)
{
  body_ += "<text x=\"" + number(x) + "\" y=\"" + number(y) +
           "\" font-family=\"sans-serif\" font-size=\"" + number(size) +
           "\" text-anchor=\"" + std::string(anchor) + "\">" +
           escape(content) + "</text>\n";
}

void Document::rect(double x, double y, double w, double h,
                    std::string_view stroke, std::string_view fill)
{
  body_ += "<rect x=\"" + number(x) + "\" y=\"" + number(y) + "\" width=\"" +
           number(w) + "\" height=\"" + number(h) + "\" stroke=\"" +
           std::string(stroke) + "\" fill=\"" + std::string(fill) + "\"/>\n";
}

std::string Document::render() const
{
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<!-- schema_version=1 -->\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         number(width_) + "\" height=\"" + number(height_) +
         "\" viewBox=\"0 0 " + number(width_) + " " + number(height_) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

Chart::Chart(std::string title, std::string x_label, std::string y_label)
  : title_(std::move(title))
  , x_label_(std::move(x_label))
  , y_label_(std::move(y_label))
{
}

void Chart::x_range(double lo, double hi)
{
  x_range_ = { lo, hi };
}

void Chart::y_range(double lo, double hi)
{
  y_range_ = { lo, hi };
}

void Chart::line(std::span<const double> x, std::span<const double> y,
                 std::string color, std::string label, bool dashed,
                 double width)
{
  layers_.push_back({ Layer::Kind::line, { x.begin(), x.end() },
                      { y.begin(), y.end() }, {}, std::move(color),
                      std::move(label), dashed, width });
}

void Chart::points(std::span<const double> x, std::span<const double> y,
                   std::string color, double radius)
{
  layers_.push_back({ Layer::Kind::points, { x.begin(), x.end() },
                      { y.begin(), y.end() }, {}, std::move(color), {}, false,
                      radius });
}

void Chart::band(std::span<const double> x, std::span<const double> lower,
                 std::span<const double> upper, std::string color,
                 double opacity)
{
  layers_.push_back({ Layer::Kind::band, { x.begin(), x.end() },
                      { lower.begin(), lower.end() },
                      { upper.begin(), upper.end() }, std::move(color), {},
                      false, opacity });
}

void Chart::vline(double x, std::string color, std::string label)
{
  layers_.push_back({ Layer::Kind::vline, { x }, {}, {}, std::move(color),
                      std::move(label), true, 1.0 });
}

void Chart::annotate(double x, double y, std::string content)
{
  layers_.push_back({ Layer::Kind::note, { x }, { y }, {}, "black",
                      std::move(content), false, 11.0 });
}

std::string Chart::render() const
{
  constexpr double inf = std::numeric_limits<double>::infinity();
  double xlo = inf, xhi = -inf, ylo = inf, yhi = -inf;
  for (const auto& l : layers_) {
    for (double v : l.x)
      if (std::isfinite(v)) {
        xlo = std::min(xlo, v);
        xhi = std::max(xhi, v);
      }
    if (l.kind == Layer::Kind::vline)
      continue;
    for (const auto* ys : { &l.y, &l.y2 })
      for (double v : *ys)
        if (std::isfinite(v)) {
          ylo = std::min(ylo, v);
          yhi = std::max(yhi, v);
        }
  }
  if (!std::isfinite(xlo)) {
    xlo = 0.0;
    xhi = 1.0;
  }
  if (!std::isfinite(ylo)) {
    ylo = 0.0;
    yhi = 1.0;
  }
  auto [x0, x1] = x_range_ ? *x_range_ : pad_range(xlo, xhi);
  auto [y0, y1] = y_range_ ? *y_range_ : pad_range(ylo, yhi);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  const auto py = [&](double y) {
    return kTop + ph - (y - y0) / (y1 - y0) * ph;
  };

  Document doc(kWidth, kHeight);
  doc.text(kWidth / 2.0 - kRight / 2.0 + kLeft / 2.0, 24.0, title_, "middle",
           15.0);
  doc.rect(kLeft, kTop, pw, ph, "black");

  const double xs = nice_step(x1 - x0, 6);
  for (double t = std::ceil(x0 / xs - 1e-9) * xs; t <= x1 + xs * 1e-9;
       t += xs) {
    doc.line(px(t), kTop + ph, px(t), kTop + ph + 5.0, "black");
    doc.text(px(t), kTop + ph + 18.0, tick_label(t, xs), "middle", 11.0);
  }
  const double ys = nice_step(y1 - y0, 5);
  for (double t = std::ceil(y0 / ys - 1e-9) * ys; t <= y1 + ys * 1e-9;
       t += ys) {
    doc.line(kLeft - 5.0, py(t), kLeft, py(t), "black");
    doc.text(kLeft - 8.0, py(t) + 4.0, tick_label(t, ys), "end", 11.0);
  }
  doc.text(kLeft + pw / 2.0, kHeight - 18.0, x_label_, "middle", 13.0);
  doc.text(18.0, kTop + ph / 2.0, y_label_, "middle", 13.0);

  std::vector<std::pair<double, double>> pts;
  for (const auto& l : layers_) {
    switch (l.kind) {
      case Layer::Kind::line: {
        // Non-finite values split the line into separate segments.
        pts.clear();
        for (std::size_t i = 0; i < l.x.size(); ++i) {
          if (std::isfinite(l.x[i]) && std::isfinite(l.y[i])) {
            pts.emplace_back(px(l.x[i]), py(l.y[i]));
          } else if (!pts.empty()) {
            doc.polyline(pts, l.color, l.size, l.dashed);
            pts.clear();
          }
        }
        if (!pts.empty())
          doc.polyline(pts, l.color, l.size, l.dashed);
        break;
      }
      case Layer::Kind::points:
        for (std::size_t i = 0; i < l.x.size(); ++i)
          if (std::isfinite(l.x[i]) && std::isfinite(l.y[i]))
            doc.circle(px(l.x[i]), py(l.y[i]), l.size, l.color);
        break;
      case Layer::Kind::band: {
        pts.clear();
        for (std::size_t i = 0; i < l.x.size(); ++i)
          pts.emplace_back(px(l.x[i]), py(l.y2[i]));
        for (std::size_t i = l.x.size(); i-- > 0;)
          pts.emplace_back(px(l.x[i]), py(l.y[i]));
        doc.polygon(pts, l.color, l.size);
        break;
      }
      case Layer::Kind::vline:
        doc.line(px(l.x[0]), kTop, px(l.x[0]), kTop + ph, l.color, 1.0, true);
        if (!l.label.empty())
          doc.text(px(l.x[0]), kTop - 4.0, l.label, "middle", 10.0);
        break;
      case Layer::Kind::note:
        doc.text(px(l.x[0]) + 4.0, py(l.y[0]) - 4.0, l.label, "start", l.size);
        break;
    }
  }

  double ly = kTop + 10.0;
  for (const auto& l : layers_) {
    if (l.kind != Layer::Kind::line || l.label.empty())
      continue;
    const double lx = kLeft + pw + 12.0;
    doc.line(lx, ly, lx + 22.0, ly, l.color, 2.0, l.dashed);
    doc.text(lx + 28.0, ly + 4.0, l.label, "start", 11.0);
    ly += 18.0;
  }
  return doc.render();
}

} // namespace irtsmooth::svg
