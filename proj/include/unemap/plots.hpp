#pragma once

#include <span>
#include <string>
#include <vector>

#include "unemap/macrocluster.hpp"
#include "unemap/mca.hpp"
#include "unemap/profiles.hpp"
#include "unemap/som.hpp"

namespace unemap::plots {

// Grid of cells, each showing the unit's code-vector profile as a polyline.
// With a partition, cells are tinted by broad class.
std::string codevector_grid(const SomMap& map, std::span<const std::string> variables,
                            const MacroPartition* partition = nullptr);

// One panel per broad class with the profiles of its units overlaid.
std::string class_profiles_panel(const SomMap& map, const MacroPartition& partition,
                                 std::span<const std::string> variables);

// Each unit a polygon pulled in toward every neighbor in proportion to
// distance / max distance; fill tinted by broad class when given.
std::string neighbor_distance_map(const SomMap& map, const NeighborDistanceField& field,
                                  const MacroPartition* partition = nullptr);

// Stacked bars, one per scope, for a single variable.
std::string distribution_bars(std::span<const QualDistribution> distributions,
                              const std::string& title);

// Per grid cell, a stacked bar of the variable's modalities; empty cells grey.
std::string cell_distribution_grid(const GridTopology& topology,
                                   std::span<const QualDistribution> cells,
                                   const std::string& title);

// Modality scatter in the requested plane, one circle per modality.
std::string mca_plane(const McaResult& result, std::size_t axis_x, std::size_t axis_y);

}  // namespace unemap::plots
