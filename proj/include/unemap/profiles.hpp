#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unemap/dataset.hpp"
#include "unemap/matrix.hpp"
#include "unemap/som.hpp"
#include "unemap/transitions.hpp"

namespace unemap {

struct VariableStats {
  std::size_t count = 0;  // non-missing values
  double mean = 0.0;
  double sd = 0.0;        // population SD
  bool defined = false;   // false when count is 0
};

struct ClassProfile {
  std::vector<std::string> variables;
  std::vector<std::size_t> class_counts;          // records per class, index label-1
  std::vector<std::vector<VariableStats>> classes;  // [class][variable]
  std::vector<VariableStats> population;
  std::size_t population_count = 0;

  std::size_t k() const { return class_counts.size(); }
};

// Raw descriptive values per individual: the 11 quantitative variables then
// RSS11 and RSS12. Missing values are NaN. `rss` may list a subset of the
// individuals; the others get NaN indicators.
struct DescriptiveTable {
  std::vector<std::string> variables;
  Matrix values;
};
DescriptiveTable descriptive_values(std::span<const SpellRecord> individuals,
                                    std::span<const RssIndicators> rss);

// Labels are 1..k per row of `values`; NaN entries are skipped per variable.
ClassProfile class_profiles(const Matrix& values, std::span<const int> labels, std::size_t k,
                            std::vector<std::string> variables);

enum class Scope { broad_class, grid_cell, population };
std::string_view name_of(Scope s);

struct QualDistribution {
  Scope scope = Scope::population;
  int scope_id = 0;  // class label, unit index, or 0 for the population
  Qual variable = Qual::AGEC;
  std::vector<std::string> modalities;
  std::vector<double> frequency;
  std::size_t count = 0;
  bool empty = true;
};

// One distribution per id in `scope_ids` (empty groups are kept and flagged)
// followed by the population distribution. `group` gives each record's id.
// Records coded -1 (not recorded) are left out; any other code outside the
// variable's modalities is an error.
std::vector<QualDistribution> qualitative_distribution(
    std::span<const std::array<int, kQualCount>> modalities, std::span<const int> group,
    std::span<const int> scope_ids, Scope scope, Qual variable, const CodingSpec& coding);

struct NeighborDistanceField {
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;  // per unit, ascending
  double max_distance = 0.0;
};

NeighborDistanceField neighbor_distances(const SomMap& map);

std::vector<std::pair<std::string, double>> codevector_profile(
    const SomMap& map, std::size_t unit, std::span<const std::string> variables);

std::string export_class_profiles(const ClassProfile& profile, char delimiter = ',');
std::string export_distributions(std::span<const QualDistribution> distributions,
                                 char delimiter = ',');
std::string export_neighbor_distances(const NeighborDistanceField& field, char delimiter = ',');

}  // namespace unemap
