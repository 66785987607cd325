#include "unemap/transitions.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

std::string_view name_of(Direction d) {
  return d == Direction::registration_to_exit ? "registration_to_exit" : "exit_to_registration";
}

TransitionTable table_from_counts(const Grid4<std::uint64_t>& counts, Direction direction) {
  TransitionTable t;
  t.direction = direction;
  t.counts = counts;
  std::array<std::uint64_t, 4> row_sum{}, col_sum{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      row_sum[i] += counts[i][j];
      col_sum[j] += counts[i][j];
      t.total += counts[i][j];
    }
  if (t.total == 0) return t;
  const double total = static_cast<double>(t.total);
  for (int i = 0; i < 4; ++i) {
    t.row_margin[i] = 100.0 * static_cast<double>(row_sum[i]) / total;
    t.column_margin[i] = 100.0 * static_cast<double>(col_sum[i]) / total;
    t.row_empty[i] = row_sum[i] == 0;
    for (int j = 0; j < 4; ++j) {
      const double c = static_cast<double>(counts[i][j]);
      t.total_share[i][j] = 100.0 * c / total;
      t.row_share[i][j] = row_sum[i] ? 100.0 * c / static_cast<double>(row_sum[i]) : 0.0;
    }
  }
  return t;
}

void TransitionTable::merge(const TransitionTable& other) {
  if (other.direction != direction) throw DomainError("cannot merge tables of different directions");
  Grid4<std::uint64_t> sum = counts;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sum[i][j] += other.counts[i][j];
  *this = table_from_counts(sum, direction);
}

TransitionTable build_table(std::span<const TransitionPair> pairs, Direction direction) {
  Grid4<std::uint64_t> counts{};
  for (const auto& p : pairs) {
    if (p.direction != direction)
      throw DomainError("transition of direction " + std::string(name_of(p.direction)) +
                        " in a " + std::string(name_of(direction)) + " table");
    if (p.from < 1 || p.from > 4 || p.to < 1 || p.to > 4)
      throw DomainError("transition modality outside 1..4");
    ++counts[p.from - 1][p.to - 1];
  }
  return table_from_counts(counts, direction);
}

double row_share_from_total(double total_share, double row_margin) {
  if (!(row_margin > 0.0)) throw DomainError("row margin must be positive");
  return 100.0 * total_share / row_margin;
}

std::vector<Cell> significant_cells(const TransitionTable& table, double threshold) {
  std::vector<Cell> cells;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (table.total_share[i][j] >= threshold)
        cells.push_back({i + 1, j + 1, table.total_share[i][j]});
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Cell& a, const Cell& b) { return a.share > b.share; });
  return cells;
}

RssIndicators rss_indicators(std::string individual_id, std::span<const TransitionPair> trajectory) {
  if (trajectory.empty())
    throw DomainError("RSS indicators undefined for " + individual_id + ": no exit->registration transition");
  std::size_t job_to_layoff = 0, job_to_contract_end = 0;
  for (const auto& p : trajectory) {
    if (p.direction != Direction::exit_to_registration)
      throw DomainError("RSS indicators need exit->registration transitions");
    if (p.from == 1 && p.to == 1) ++job_to_layoff;
    if (p.from == 1 && p.to == 2) ++job_to_contract_end;
  }
  const double n = static_cast<double>(trajectory.size());
  return {std::move(individual_id), static_cast<double>(job_to_layoff) / n,
          static_cast<double>(job_to_contract_end) / n, trajectory.size()};
}

namespace {

// Spells grouped per individual (first-appearance order), sorted by spell index.
std::vector<std::vector<const SpellRecord*>> spells_by_individual(std::span<const SpellRecord> spells) {
  std::unordered_map<std::string_view, std::size_t> slot;
  std::vector<std::vector<const SpellRecord*>> groups;
  for (const auto& s : spells) {
    auto [it, inserted] = slot.try_emplace(s.individual_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&s);
  }
  for (auto& g : groups)
    std::stable_sort(g.begin(), g.end(), [](auto* a, auto* b) { return a->spell_index < b->spell_index; });
  return groups;
}

void append_reentries(const std::vector<const SpellRecord*>& g, std::vector<TransitionPair>& out) {
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const auto& cur = *g[k];
    const auto& next = *g[k + 1];
    if (next.spell_index != cur.spell_index + 1 || !cur.rmotifa) continue;
    out.push_back({*cur.rmotifa, next.rmotifi, Direction::exit_to_registration, cur.individual_id});
  }
}

}  // namespace

std::vector<TransitionPair> extract_pairs(std::span<const SpellRecord> spells, Direction direction) {
  std::vector<TransitionPair> out;
  if (direction == Direction::registration_to_exit) {
    for (const auto& s : spells)
      if (s.rmotifa) out.push_back({s.rmotifi, *s.rmotifa, direction, s.individual_id});
    return out;
  }
  for (const auto& g : spells_by_individual(spells)) append_reentries(g, out);
  return out;
}

std::vector<RssIndicators> rss_by_individual(std::span<const SpellRecord> spells) {
  std::vector<RssIndicators> out;
  std::vector<TransitionPair> pairs;
  for (const auto& g : spells_by_individual(spells)) {
    pairs.clear();
    append_reentries(g, pairs);
    if (!pairs.empty()) out.push_back(rss_indicators(g.front()->individual_id, pairs));
  }
  return out;
}

std::string export_table(const TransitionTable& t, char delimiter) {
  const bool reg = t.direction == Direction::registration_to_exit;
  std::string out = std::string(reg ? "RMOTIFI\\RMOTIFA" : "RMOTIFA\\RMOTIFI");
  for (int j = 1; j <= 4; ++j) out += delimiter + std::to_string(j);
  out += delimiter;
  out += "Total\n";
  for (int i = 0; i < 4; ++i) {
    out += std::to_string(i + 1);
    for (int j = 0; j < 4; ++j) {
      out += delimiter;
      out += text::format_fixed(t.total_share[i][j], 2) + " % ";
      out += t.row_empty[i] ? std::string("empty") : text::format_fixed(t.row_share[i][j], 2) + " %";
    }
    out += delimiter + text::format_fixed(t.row_margin[i], 2) + " %\n";
  }
  out += "Total";
  for (int j = 0; j < 4; ++j) out += delimiter + text::format_fixed(t.column_margin[j], 2) + " %";
  out += delimiter;
  out += t.empty() ? "0.00 %\n" : "100.00 %\n";
  return out;
}

std::string export_counts(const TransitionTable& t, char delimiter) {
  std::vector<std::string> header = {"from", "to", "count", "total_share", "row_share", "row_empty"};
  std::string out = text::join(header, delimiter) + "\n";
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      out += text::join({std::to_string(i + 1), std::to_string(j + 1), std::to_string(t.counts[i][j]),
                         text::format_double(t.total_share[i][j]), text::format_double(t.row_share[i][j]),
                         t.row_empty[i] ? "1" : "0"},
                        delimiter);
      out += '\n';
    }
  return out;
}

}  // namespace unemap
