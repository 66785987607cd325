#include "unemap/svg.hpp"

#include <array>
#include <cmath>

#include "unemap/text_io.hpp"

namespace unemap::svg {

namespace {

std::string cls(std::string_view c) {
  return c.empty() ? std::string() : " class=\"" + escape(c) + "\"";
}

std::string points_attr(const std::vector<std::pair<double, double>>& points) {
  std::string s;
  for (const auto& [x, y] : points) {
    if (!s.empty()) s += ' ';
    s += num(x) + "," + num(y);
  }
  return s;
}

}  // namespace

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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
  if (std::abs(v) < 0.005) v = 0.0;
  return text::format_fixed(v, 2);
}

std::string_view palette(std::size_t i) {
  static constexpr std::array<std::string_view, 10> colors = {
      "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
      "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  return colors[i % colors.size()];
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::rect(double x, double y, double w, double h, std::string_view fill,
                    std::string_view stroke, std::string_view css_class) {
  body_ += "<rect" + cls(css_class) + " x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
           num(w) + "\" height=\"" + num(h) + "\" fill=\"" + escape(fill) + "\" stroke=\"" +
           escape(stroke) + "\"/>\n";
}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                    double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + escape(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill,
                      std::string_view css_class, std::string_view title) {
  body_ += "<circle" + cls(css_class) + " cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(r) + "\" fill=\"" + escape(fill) + "\"";
  if (title.empty())
    body_ += "/>\n";
  else
    body_ += "><title>" + escape(title) + "</title></circle>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& points,
                        std::string_view stroke, double width, std::string_view css_class) {
  body_ += "<polyline" + cls(css_class) + " points=\"" + points_attr(points) +
           "\" fill=\"none\" stroke=\"" + escape(stroke) + "\" stroke-width=\"" + num(width) +
           "\"/>\n";
}

void Document::polygon(const std::vector<std::pair<double, double>>& points,
                       std::string_view fill, std::string_view stroke,
                       std::string_view css_class) {
  body_ += "<polygon" + cls(css_class) + " points=\"" + points_attr(points) + "\" fill=\"" +
           escape(fill) + "\" stroke=\"" + escape(stroke) + "\"/>\n";
}

void Document::text(double x, double y, std::string_view content, double size,
                    std::string_view anchor, std::string_view css_class) {
  body_ += "<text" + cls(css_class) + " x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           num(size) + "\" text-anchor=\"" + escape(anchor) + "\" font-family=\"sans-serif\">" +
           escape(content) + "</text>\n";
}

std::string Document::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
         num(height_) + "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

}  // namespace unemap::svg
