#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unemap/dataset.hpp"

namespace unemap {

enum class Direction { registration_to_exit, exit_to_registration };

std::string_view name_of(Direction d);

struct TransitionPair {
  int from = 1;  // modality 1..4 of the origin status
  int to = 1;
  Direction direction = Direction::registration_to_exit;
  std::string individual_id;
};

template <typename T>
using Grid4 = std::array<std::array<T, 4>, 4>;

// 4x4 transition counts with the two percentage views. Shares are in percent.
// Rows with no transitions carry zero row shares and row_empty set.
struct TransitionTable {
  Direction direction = Direction::registration_to_exit;
  Grid4<std::uint64_t> counts{};
  Grid4<double> total_share{};
  Grid4<double> row_share{};
  std::array<double, 4> row_margin{};
  std::array<double, 4> column_margin{};
  std::array<bool, 4> row_empty{true, true, true, true};
  std::uint64_t total = 0;

  bool empty() const { return total == 0; }

  // Count addition; shares are recomputed.
  void merge(const TransitionTable& other);
};

TransitionTable table_from_counts(const Grid4<std::uint64_t>& counts, Direction direction);
TransitionTable build_table(std::span<const TransitionPair> pairs, Direction direction);

// Row share implied by a total share and its row margin, all in percent.
double row_share_from_total(double total_share, double row_margin);

struct Cell {
  int from = 0;
  int to = 0;
  double share = 0.0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Cells with total share >= threshold (percent), by decreasing share.
std::vector<Cell> significant_cells(const TransitionTable& table, double threshold);

struct RssIndicators {
  std::string individual_id;
  double rss11 = 0.0;  // share of exit->registration transitions job -> lay-off
  double rss12 = 0.0;  // share of transitions job -> end of fixed-term contract
  std::size_t n_transitions = 0;
};

// Trajectory: exit->registration pairs of one individual. Throws DomainError
// on an empty trajectory.
RssIndicators rss_indicators(std::string individual_id, std::span<const TransitionPair> trajectory);

// Registration->exit: one pair per spell with a recorded exit.
// Exit->registration: one pair per consecutive spell pair (s, s+1) of an
// individual where spell s has a recorded exit.
std::vector<TransitionPair> extract_pairs(std::span<const SpellRecord> spells, Direction direction);

// Indicators for every individual with at least one exit->registration pair,
// in order of first appearance.
std::vector<RssIndicators> rss_by_individual(std::span<const SpellRecord> spells);

// Grid layout: one line per origin modality, each cell "total% row%", then
// row margin; final line holds column margins.
std::string export_table(const TransitionTable& table, char delimiter = ',');
// Long layout: from,to,count,total_share,row_share,row_empty at full precision.
std::string export_counts(const TransitionTable& table, char delimiter = ',');

}  // namespace unemap
