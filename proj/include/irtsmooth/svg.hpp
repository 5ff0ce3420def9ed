#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irtsmooth::svg {

//! Fixed six-decimal rendering; negative zero prints as zero and non-finite
//! values as "NA".
std::string number(double value);

//! Escapes &, <, >, " for text and attribute content.
std::string escape(std::string_view text);

//! Pixel-space drawing surface. Elements are emitted in insertion order.
class Document
{
public:
  Document(double width, double height);

  void line(double x1, double y1, double x2, double y2,
            std::string_view color, double width = 1.0, bool dashed = false);
  void polyline(std::span<const std::pair<double, double>> points,
                std::string_view color, double width = 1.5,
                bool dashed = false);
  void polygon(std::span<const std::pair<double, double>> points,
               std::string_view fill, double opacity);
  void circle(double x, double y, double r, std::string_view fill);
  void text(double x, double y, std::string_view content,
            std::string_view anchor = "start", double size = 12.0);
  void rect(double x, double y, double w, double h, std::string_view stroke,
            std::string_view fill = "none");

  double width() const noexcept { return width_; }
  double height() const noexcept { return height_; }
  std::string render() const;

private:
  double width_;
  double height_;
  std::string body_;
};

//! Cartesian chart with automatic ranges, ticks and a legend.
class Chart
{
public:
  Chart(std::string title, std::string x_label, std::string y_label);

  void x_range(double lo, double hi);
  void y_range(double lo, double hi);

  void line(std::span<const double> x, std::span<const double> y,
            std::string color, std::string label = {}, bool dashed = false,
            double width = 1.5);
  void points(std::span<const double> x, std::span<const double> y,
              std::string color, double radius = 2.5);
  void band(std::span<const double> x, std::span<const double> lower,
            std::span<const double> upper, std::string color,
            double opacity = 0.2);
  void vline(double x, std::string color, std::string label = {});
  //! Text next to a data-space point.
  void annotate(double x, double y, std::string content);

  std::string render() const;

private:
  struct Layer
  {
    enum class Kind
    {
      line,
      points,
      band,
      vline,
      note
    } kind;
    std::vector<double> x, y, y2;
    std::string color;
    std::string label;
    bool dashed = false;
    double size = 1.5;
  };

  std::string title_;
  std::string x_label_;
  std::string y_label_;
  std::optional<std::pair<double, double>> x_range_;
  std::optional<std::pair<double, double>> y_range_;
  std::vector<Layer> layers_;
};

//! Distinct colors for series; index 0 is never blue so a highlighted series
//! can use kHighlight.
std::string palette(std::size_t index);
inline constexpr std::string_view kHighlight = "#1f4fd8";

} // namespace irtsmooth::svg
