#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "unemap/matrix.hpp"
#include "unemap/som.hpp"

namespace unemap {

// Cluster ids follow the usual linkage convention: leaves are 0..n-1 and the
// cluster created by merge t gets id n + t.
struct Merge {
  std::size_t a = 0;  // smaller id
  std::size_t b = 0;  // larger id
  double cost = 0.0;  // increase of the weighted within-cluster sum of squares
  std::size_t size = 0;  // leaves in the new cluster
  double weight = 0.0;   // total weight of the new cluster

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;
};

struct MacroPartition {
  std::size_t k = 0;
  std::vector<int> label;                        // per unit, 1..k
  std::vector<std::vector<std::size_t>> members; // per class (index label-1), ascending units
  std::vector<std::size_t> record_counts;        // per class, empty until composed
};

// Full Ward agglomeration with the Lance-Williams update. Empty `weights`
// means unit weights. Ties go to the lexicographically smallest
// (cost, smaller id, larger id).
Dendrogram ward_linkage(const Matrix& vectors, std::span<const double> weights = {});

// Partition after the first n - k merges. Classes are labelled 1..k in order
// of their smallest member.
MacroPartition cut(const Dendrogram& dendrogram, std::size_t k);

struct WardResult {
  MacroPartition partition;
  Dendrogram dendrogram;
};

WardResult ward(const Matrix& vectors, std::span<const double> weights, std::size_t k);

// Fills record_counts from per-unit occupancy and renumbers classes by
// decreasing record count, ties by smallest member unit.
void canonicalize(MacroPartition& partition, std::span<const std::size_t> unit_counts);

struct Contiguity {
  int label = 0;
  bool contiguous = false;
  std::size_t components = 0;
};

// Connected components of each class under the 8-neighborhood.
std::vector<Contiguity> contiguity_report(const MacroPartition& partition, const GridTopology& topology);

std::string export_partition(const MacroPartition& partition, const GridTopology& topology,
                             char delimiter = ',');
std::string export_dendrogram(const Dendrogram& dendrogram, char delimiter = ',');

}  // namespace unemap
