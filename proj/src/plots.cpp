#include "unemap/plots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unemap/svg.hpp"
#include "unemap/text_io.hpp"

namespace unemap::plots {

namespace {

constexpr double kCell = 64.0;
constexpr double kMargin = 30.0;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

Range value_range(const Matrix& m) {
  Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (double v : m.values()) {
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  if (!(r.hi > r.lo)) {
    r.lo -= 1.0;
    r.hi += 1.0;
  }
  return r;
}

std::vector<std::pair<double, double>> profile_points(std::span<const double> v, Range r, double x0,
                                                      double y0, double w, double h) {
  std::vector<std::pair<double, double>> pts;
  const double step = v.size() > 1 ? w / static_cast<double>(v.size() - 1) : 0.0;
  for (std::size_t k = 0; k < v.size(); ++k)
    pts.emplace_back(x0 + step * static_cast<double>(k), y0 + h - (v[k] - r.lo) / (r.hi - r.lo) * h);
  return pts;
}

std::string tint(std::size_t i) {
  // light variant of the palette colour for backgrounds
  return std::string(svg::palette(i)) + "55";
}

}  // namespace

std::string codevector_grid(const SomMap& map, std::span<const std::string> variables,
                            const MacroPartition* partition) {
  const auto& t = map.topology;
  const double legend = 14.0 * static_cast<double>(variables.size()) + 20.0;
  svg::Document doc(2 * kMargin + kCell * static_cast<double>(t.cols),
                    2 * kMargin + kCell * static_cast<double>(t.rows) + legend);
  const Range r = value_range(map.codebook);
  doc.text(kMargin, 18, partition ? "Code vectors and broad classes" : "Code-vector profiles", 12);
  for (std::size_t u = 0; u < t.units(); ++u) {
    const double x = kMargin + kCell * static_cast<double>(t.col_of(u));
    const double y = kMargin + kCell * static_cast<double>(t.row_of(u));
    const std::string fill =
        partition ? tint(static_cast<std::size_t>(partition->label[u] - 1)) : std::string("none");
    doc.rect(x, y, kCell, kCell, fill, "#999999", "cell");
    const double zero = y + 4 + (kCell - 8) * (r.hi / (r.hi - r.lo));
    if (r.lo < 0 && r.hi > 0) doc.line(x + 4, zero, x + kCell - 4, zero, "#cccccc", 0.5);
    doc.polyline(profile_points(map.codebook.row(u), r, x + 4, y + 4, kCell - 8, kCell - 8),
                 "#222222", 1.0, "profile");
  }
  double ly = 2 * kMargin + kCell * static_cast<double>(t.rows);
  doc.text(kMargin, ly, "x axis: " + text::join(std::vector<std::string>(variables.begin(), variables.end()), ' '), 10);
  doc.text(kMargin, ly + 14, "y range: " + text::format_fixed(r.lo, 2) + " to " + text::format_fixed(r.hi, 2) + " (standardized)", 10);
  if (partition)
    for (std::size_t c = 0; c < partition->k; ++c) {
      const double lx = kMargin + 90.0 * static_cast<double>(c);
      doc.rect(lx, ly + 22, 10, 10, svg::palette(c));
      doc.text(lx + 14, ly + 31, "class " + std::to_string(c + 1), 10);
    }
  return doc.str();
}

std::string class_profiles_panel(const SomMap& map, const MacroPartition& partition,
                                 std::span<const std::string> variables) {
  const double pw = 220.0, ph = 160.0;
  const std::size_t k = partition.k;
  svg::Document doc(kMargin + (pw + kMargin) * static_cast<double>(k), ph + 3 * kMargin + 40);
  const Range r = value_range(map.codebook);
  for (std::size_t c = 0; c < k; ++c) {
    const double x = kMargin + (pw + kMargin) * static_cast<double>(c);
    const double y = 2 * kMargin;
    doc.text(x, y - 8, "class " + std::to_string(c + 1) + " (" +
                           std::to_string(partition.members[c].size()) + " units)", 11);
    doc.rect(x, y, pw, ph, "none", "#999999");
    for (std::size_t u : partition.members[c])
      doc.polyline(profile_points(map.codebook.row(u), r, x, y, pw, ph), svg::palette(c), 1.0,
                   "profile");
    const auto n = variables.size();
    for (std::size_t j = 0; j < n; ++j) {
      const double vx = x + (n > 1 ? pw * static_cast<double>(j) / static_cast<double>(n - 1) : 0.0);
      doc.text(vx, y + ph + 12 + 10 * static_cast<double>(j % 2), variables[j], 7, "middle");
    }
  }
  return doc.str();
}

std::string neighbor_distance_map(const SomMap& map, const NeighborDistanceField& field,
                                  const MacroPartition* partition) {
  const auto& t = map.topology;
  svg::Document doc(2 * kMargin + kCell * static_cast<double>(t.cols),
                    2 * kMargin + kCell * static_cast<double>(t.rows));
  doc.text(kMargin, 18, "Distances between neighboring code vectors", 12);
  const double half = kCell / 2.0;
  const double max_inset = 0.45 * half;
  for (std::size_t u = 0; u < t.units(); ++u) {
    const double cx = kMargin + kCell * static_cast<double>(t.col_of(u)) + half;
    const double cy = kMargin + kCell * static_cast<double>(t.row_of(u)) + half;
    // eight compass points starting north, clockwise
    static constexpr int dr[8] = {-1, -1, 0, 1, 1, 1, 0, -1};
    static constexpr int dc[8] = {0, 1, 1, 1, 0, -1, -1, -1};
    std::vector<std::pair<double, double>> pts;
    for (int p = 0; p < 8; ++p) {
      double inset = 0.0;
      const long nr = static_cast<long>(t.row_of(u)) + dr[p];
      const long nc = static_cast<long>(t.col_of(u)) + dc[p];
      if (nr >= 0 && nc >= 0 && nr < static_cast<long>(t.rows) && nc < static_cast<long>(t.cols)) {
        const auto v = static_cast<std::size_t>(nr) * t.cols + static_cast<std::size_t>(nc);
        for (const auto& [w, d] : field.neighbors[u])
          if (w == v && field.max_distance > 0) inset = max_inset * d / field.max_distance;
      }
      const double reach = (dr[p] != 0 && dc[p] != 0 ? half * std::sqrt(2.0) : half) - inset;
      const double len = std::sqrt(static_cast<double>(dr[p] * dr[p] + dc[p] * dc[p]));
      pts.emplace_back(cx + reach * dc[p] / len, cy + reach * dr[p] / len);
    }
    const std::string fill =
        partition ? std::string(svg::palette(static_cast<std::size_t>(partition->label[u] - 1)))
                  : std::string("#888888");
    doc.polygon(pts, fill, "#333333", "unit");
  }
  return doc.str();
}

std::string distribution_bars(std::span<const QualDistribution> distributions,
                              const std::string& title) {
  const double bw = 40.0, gap = 16.0, h = 220.0;
  const std::size_t m = distributions.empty() ? 0 : distributions.front().modalities.size();
  svg::Document doc(2 * kMargin + (bw + gap) * static_cast<double>(distributions.size()) + 140,
                    h + 3 * kMargin + 20);
  doc.text(kMargin, 18, title, 12);
  const double base = 2 * kMargin + h;
  for (std::size_t s = 0; s < distributions.size(); ++s) {
    const auto& d = distributions[s];
    const double x = kMargin + (bw + gap) * static_cast<double>(s);
    double y = base;
    if (d.empty) doc.rect(x, base - h, bw, h, "#eeeeee", "#999999", "empty");
    for (std::size_t j = 0; j < d.frequency.size(); ++j) {
      const double bh = d.frequency[j] * h;
      y -= bh;
      if (bh > 0) doc.rect(x, y, bw, bh, svg::palette(j), "none", "bar");
    }
    const std::string label = d.scope == Scope::population ? "all" : std::to_string(d.scope_id);
    doc.text(x + bw / 2, base + 14, label, 10, "middle");
  }
  const double lx = kMargin + (bw + gap) * static_cast<double>(distributions.size()) + 10;
  for (std::size_t j = 0; j < m; ++j) {
    doc.rect(lx, 2 * kMargin + 16.0 * static_cast<double>(j), 10, 10, svg::palette(j));
    doc.text(lx + 14, 2 * kMargin + 9 + 16.0 * static_cast<double>(j),
             distributions.front().modalities[j], 10);
  }
  return doc.str();
}

std::string cell_distribution_grid(const GridTopology& topology,
                                   std::span<const QualDistribution> cells,
                                   const std::string& title) {
  svg::Document doc(2 * kMargin + kCell * static_cast<double>(topology.cols) + 140,
                    2 * kMargin + kCell * static_cast<double>(topology.rows));
  doc.text(kMargin, 18, title, 12);
  std::size_t m = 0;
  const std::vector<std::string>* labels = nullptr;
  for (const auto& d : cells) {
    if (d.scope != Scope::grid_cell) continue;
    const auto u = static_cast<std::size_t>(d.scope_id);
    const double x = kMargin + kCell * static_cast<double>(topology.col_of(u));
    const double y = kMargin + kCell * static_cast<double>(topology.row_of(u));
    m = d.modalities.size();
    labels = &d.modalities;
    if (d.empty) {
      doc.rect(x, y, kCell, kCell, "#eeeeee", "#999999", "empty");
      continue;
    }
    doc.rect(x, y, kCell, kCell, "none", "#999999", "cell");
    double bx = x + 2;
    for (std::size_t j = 0; j < d.frequency.size(); ++j) {
      const double w = d.frequency[j] * (kCell - 4);
      if (w > 0) doc.rect(bx, y + 2, w, kCell - 4, svg::palette(j), "none", "bar");
      bx += w;
    }
  }
  const double lx = 2 * kMargin + kCell * static_cast<double>(topology.cols);
  for (std::size_t j = 0; j < m; ++j) {
    doc.rect(lx, kMargin + 16.0 * static_cast<double>(j), 10, 10, svg::palette(j));
    doc.text(lx + 14, kMargin + 9 + 16.0 * static_cast<double>(j), (*labels)[j], 10);
  }
  return doc.str();
}

std::string mca_plane(const McaResult& result, std::size_t axis_x, std::size_t axis_y) {
  const auto pts = modality_coordinates(result, axis_x, axis_y);
  const double size = 520.0;
  svg::Document doc(size + 2 * kMargin, size + 2 * kMargin);
  double span_ = 1e-9;
  for (const auto& p : pts) span_ = std::max({span_, std::abs(p.x), std::abs(p.y)});
  span_ *= 1.15;
  auto sx = [&](double v) { return kMargin + size / 2 + v / span_ * size / 2; };
  auto sy = [&](double v) { return kMargin + size / 2 - v / span_ * size / 2; };
  doc.line(sx(-span_), sy(0), sx(span_), sy(0), "#aaaaaa");
  doc.line(sx(0), sy(-span_), sx(0), sy(span_), "#aaaaaa");
  auto axis_label = [&](std::size_t a) {
    return "axis " + std::to_string(a) + " (" +
           text::format_fixed(result.inertia_share[a - 1], 2) + "%)";
  };
  doc.text(kMargin + size, sy(0) - 6, axis_label(axis_x), 10, "end");
  doc.text(sx(0) + 6, kMargin + 10, axis_label(axis_y), 10);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const auto& p = pts[j];
    const std::string label = p.variable + ":" + p.modality;
    const auto color = svg::palette(result.columns[j].variable);
    doc.circle(sx(p.x), sy(p.y), 3.5, color, "modality", label);
    doc.text(sx(p.x) + 5, sy(p.y) - 4, label, 8, "start", "label");
  }
  return doc.str();
}

}  // namespace unemap::plots
