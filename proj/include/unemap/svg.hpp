#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace unemap::svg {

// Minimal SVG builder. Coordinates are written with two decimals so output is
// stable across platforms.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view stroke = "none", std::string_view css_class = {});
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0);
  void circle(double cx, double cy, double r, std::string_view fill, std::string_view css_class = {},
              std::string_view title = {});
  void polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke,
                double width = 1.0, std::string_view css_class = {});
  void polygon(const std::vector<std::pair<double, double>>& points, std::string_view fill,
               std::string_view stroke = "none", std::string_view css_class = {});
  void text(double x, double y, std::string_view content, double size = 10.0,
            std::string_view anchor = "start", std::string_view css_class = {});

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string escape(std::string_view text);
std::string num(double v);

// Fixed qualitative palette, cycled.
std::string_view palette(std::size_t i);

}  // namespace unemap::svg
