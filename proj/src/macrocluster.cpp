#include "unemap/macrocluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

Dendrogram ward_linkage(const Matrix& vectors, std::span<const double> weights) {
  const std::size_t n = vectors.rows();
  if (!weights.empty() && weights.size() != n)
    throw DimensionError("ward: one weight per vector expected");
  for (double w : weights)
    if (!(w > 0.0)) throw DomainError("ward: weights must be positive");

  Dendrogram dendro;
  dendro.leaf_count = n;
  if (n < 2) return dendro;

  std::vector<double> weight(n, 1.0);
  if (!weights.empty()) std::copy(weights.begin(), weights.end(), weight.begin());
  std::vector<std::size_t> leaves(n, 1);
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<bool> active(n, true);

  // cost(i, j) for slots i < j, kept in the upper triangle.
  Matrix cost(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      cost(i, j) = weight[i] * weight[j] / (weight[i] + weight[j]) *
                   squared_distance(vectors.row(i), vectors.row(j));
  auto at = [&](std::size_t i, std::size_t j) -> double& { return i < j ? cost(i, j) : cost(j, i); };

  for (std::size_t step = 0; step + 1 < n; ++step) {
    auto best = std::make_tuple(std::numeric_limits<double>::infinity(), std::size_t{0}, std::size_t{0});
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const auto key = std::make_tuple(cost(i, j), std::min(id[i], id[j]), std::max(id[i], id[j]));
        if (key < best) {
          best = key;
          bi = i;
          bj = j;
        }
      }
    }

    const double d_ij = cost(bi, bj);
    const double wi = weight[bi], wj = weight[bj];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double wk = weight[k];
      at(bi, k) = ((wk + wi) * at(bi, k) + (wk + wj) * at(bj, k) - wk * d_ij) / (wk + wi + wj);
    }
    dendro.merges.push_back({std::get<1>(best), std::get<2>(best), d_ij, leaves[bi] + leaves[bj], wi + wj});
    weight[bi] = wi + wj;
    leaves[bi] += leaves[bj];
    id[bi] = n + step;
    active[bj] = false;
  }
  return dendro;
}

MacroPartition cut(const Dendrogram& dendrogram, std::size_t k) {
  const std::size_t n = dendrogram.leaf_count;
  if (k < 1) throw DomainError("need at least one class");
  if (k > n) throw DomainError("cannot cut " + std::to_string(n) + " vectors into " + std::to_string(k) + " classes");

  // Union-find over leaves; cluster id -> representative leaf.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> rep(n + dendrogram.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
  for (std::size_t t = 0; t < n - k; ++t) {
    const auto& m = dendrogram.merges[t];
    const auto ra = find(rep[m.a]), rb = find(rep[m.b]);
    parent[std::max(ra, rb)] = std::min(ra, rb);
    rep[n + t] = std::min(ra, rb);
  }

  MacroPartition p;
  p.k = k;
  p.label.assign(n, 0);
  std::vector<int> label_of_root(n, 0);
  int next = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto r = find(u);
    if (!label_of_root[r]) label_of_root[r] = ++next;
    p.label[u] = label_of_root[r];
  }
  p.members.resize(k);
  for (std::size_t u = 0; u < n; ++u) p.members[static_cast<std::size_t>(p.label[u] - 1)].push_back(u);
  return p;
}

WardResult ward(const Matrix& vectors, std::span<const double> weights, std::size_t k) {
  if (k < 1) throw DomainError("need at least one class");
  if (k > vectors.rows())
    throw DomainError("cannot cut " + std::to_string(vectors.rows()) + " vectors into " + std::to_string(k) + " classes");
  WardResult r;
  r.dendrogram = ward_linkage(vectors, weights);
  r.partition = cut(r.dendrogram, k);
  return r;
}

void canonicalize(MacroPartition& p, std::span<const std::size_t> unit_counts) {
  if (unit_counts.size() != p.label.size()) throw DimensionError("one count per unit expected");
  std::vector<std::size_t> counts(p.k, 0);
  for (std::size_t u = 0; u < p.label.size(); ++u) counts[static_cast<std::size_t>(p.label[u] - 1)] += unit_counts[u];

  std::vector<std::size_t> order(p.k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return p.members[a].front() < p.members[b].front();
  });
  std::vector<int> relabel(p.k);
  for (std::size_t r = 0; r < p.k; ++r) relabel[order[r]] = static_cast<int>(r + 1);

  MacroPartition out;
  out.k = p.k;
  out.label.resize(p.label.size());
  for (std::size_t u = 0; u < p.label.size(); ++u) out.label[u] = relabel[static_cast<std::size_t>(p.label[u] - 1)];
  out.members.resize(p.k);
  out.record_counts.resize(p.k);
  for (std::size_t c = 0; c < p.k; ++c) {
    out.members[static_cast<std::size_t>(relabel[c] - 1)] = p.members[c];
    out.record_counts[static_cast<std::size_t>(relabel[c] - 1)] = counts[c];
  }
  p = std::move(out);
}

std::vector<Contiguity> contiguity_report(const MacroPartition& p, const GridTopology& topology) {
  if (p.label.size() != topology.units()) throw DimensionError("partition does not cover the grid");
  std::vector<Contiguity> report(p.k);
  std::vector<bool> seen(topology.units(), false);
  std::vector<std::size_t> stack;
  for (std::size_t c = 0; c < p.k; ++c) report[c].label = static_cast<int>(c + 1);
  for (std::size_t u = 0; u < topology.units(); ++u) {
    if (seen[u]) continue;
    const int lab = p.label[u];
    ++report[static_cast<std::size_t>(lab - 1)].components;
    stack.assign(1, u);
    seen[u] = true;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto w : topology.neighbors(v))
        if (!seen[w] && p.label[w] == lab) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
  }
  for (auto& r : report) r.contiguous = r.components == 1;
  return report;
}

std::string export_partition(const MacroPartition& p, const GridTopology& topology, char delimiter) {
  std::string out = text::join({"row", "col", "unit", "broad_class"}, delimiter) + "\n";
  for (std::size_t u = 0; u < p.label.size(); ++u) {
    out += text::join({std::to_string(topology.row_of(u)), std::to_string(topology.col_of(u)),
                       std::to_string(u), std::to_string(p.label[u])},
                      delimiter);
    out += '\n';
  }
  return out;
}

std::string export_dendrogram(const Dendrogram& d, char delimiter) {
  std::string out = text::join({"step", "cluster_a", "cluster_b", "cost", "size", "weight"}, delimiter) + "\n";
  for (std::size_t t = 0; t < d.merges.size(); ++t) {
    const auto& m = d.merges[t];
    out += text::join({std::to_string(t + 1), std::to_string(m.a), std::to_string(m.b),
                       text::format_double(m.cost), std::to_string(m.size), text::format_double(m.weight)},
                      delimiter);
    out += '\n';
  }
  return out;
}

}  // namespace unemap
