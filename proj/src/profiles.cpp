#include "unemap/profiles.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

VariableStats stats_of(const std::vector<double>& v) {
  VariableStats s;
  s.count = v.size();
  if (v.empty()) return s;
  s.defined = true;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

std::string stat_field(const VariableStats& s, double value) {
  return s.defined ? text::format_double(value) : "NA";
}

}  // namespace

DescriptiveTable descriptive_values(std::span<const SpellRecord> individuals,
                                    std::span<const RssIndicators> rss) {
  DescriptiveTable t;
  for (auto n : kQuantNames) t.variables.emplace_back(n);
  t.variables.emplace_back("RSS11");
  t.variables.emplace_back("RSS12");

  std::unordered_map<std::string, const RssIndicators*> by_id;
  for (const auto& r : rss) by_id[r.individual_id] = &r;

  t.values = Matrix(individuals.size(), t.variables.size());
  for (std::size_t i = 0; i < individuals.size(); ++i) {
    const auto& rec = individuals[i];
    for (std::size_t q = 0; q < kQuantCount; ++q) t.values(i, q) = rec.quant[q].value_or(kMissing);
    auto it = by_id.find(rec.individual_id);
    t.values(i, kQuantCount) = it != by_id.end() ? it->second->rss11 : kMissing;
    t.values(i, kQuantCount + 1) = it != by_id.end() ? it->second->rss12 : kMissing;
  }
  return t;
}

ClassProfile class_profiles(const Matrix& values, std::span<const int> labels, std::size_t k,
                            std::vector<std::string> variables) {
  if (labels.size() != values.rows())
    throw DimensionError("labels cover " + std::to_string(labels.size()) + " of " +
                         std::to_string(values.rows()) + " records");
  if (variables.size() != values.cols())
    throw DimensionError("variable names do not match the value columns");

  ClassProfile p;
  p.variables = std::move(variables);
  p.class_counts.assign(k, 0);
  p.population_count = values.rows();
  for (int l : labels) {
    if (l < 1 || static_cast<std::size_t>(l) > k)
      throw DomainError("class label " + std::to_string(l) + " outside 1.." + std::to_string(k));
    ++p.class_counts[static_cast<std::size_t>(l - 1)];
  }

  p.classes.assign(k, std::vector<VariableStats>(values.cols()));
  p.population.resize(values.cols());
  std::vector<std::vector<double>> per_class(k);
  std::vector<double> all;
  for (std::size_t j = 0; j < values.cols(); ++j) {
    for (auto& v : per_class) v.clear();
    all.clear();
    for (std::size_t i = 0; i < values.rows(); ++i) {
      const double x = values(i, j);
      if (std::isnan(x)) continue;
      per_class[static_cast<std::size_t>(labels[i] - 1)].push_back(x);
      all.push_back(x);
    }
    for (std::size_t c = 0; c < k; ++c) p.classes[c][j] = stats_of(per_class[c]);
    p.population[j] = stats_of(all);
  }
  return p;
}

std::string_view name_of(Scope s) {
  switch (s) {
    case Scope::broad_class: return "class";
    case Scope::grid_cell: return "cell";
    case Scope::population: return "population";
  }
  return "?";
}

std::vector<QualDistribution> qualitative_distribution(
    std::span<const std::array<int, kQualCount>> modalities, std::span<const int> group,
    std::span<const int> scope_ids, Scope scope, Qual variable, const CodingSpec& coding) {
  if (group.size() != modalities.size())
    throw DimensionError("group ids cover " + std::to_string(group.size()) + " of " +
                         std::to_string(modalities.size()) + " records");
  const auto labels = coding.modality_labels(variable);
  const std::size_t m = labels.size();
  const auto v = static_cast<std::size_t>(variable);

  std::unordered_map<int, std::size_t> slot;
  for (std::size_t s = 0; s < scope_ids.size(); ++s) slot.emplace(scope_ids[s], s);

  std::vector<std::vector<std::size_t>> counts(scope_ids.size() + 1, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < modalities.size(); ++i) {
    const int code = modalities[i][v];
    if (code == -1) continue;
    if (code < 0 || static_cast<std::size_t>(code) >= m)
      throw DomainError(std::string(name_of(variable)) + ": unknown modality " +
                        std::to_string(code) + " for record " + std::to_string(i));
    ++counts.back()[static_cast<std::size_t>(code)];
    auto it = slot.find(group[i]);
    if (it != slot.end()) ++counts[it->second][static_cast<std::size_t>(code)];
  }

  std::vector<QualDistribution> out;
  out.reserve(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    QualDistribution d;
    const bool pop = s == scope_ids.size();
    d.scope = pop ? Scope::population : scope;
    d.scope_id = pop ? 0 : scope_ids[s];
    d.variable = variable;
    d.modalities = labels;
    for (auto c : counts[s]) d.count += c;
    d.empty = d.count == 0;
    d.frequency.assign(m, 0.0);
    if (!d.empty)
      for (std::size_t j = 0; j < m; ++j)
        d.frequency[j] = static_cast<double>(counts[s][j]) / static_cast<double>(d.count);
    out.push_back(std::move(d));
  }
  return out;
}

NeighborDistanceField neighbor_distances(const SomMap& map) {
  const auto& topo = map.topology;
  NeighborDistanceField f;
  f.neighbors.resize(topo.units());
  for (std::size_t u = 0; u < topo.units(); ++u) {
    for (std::size_t v : topo.neighbors(u)) {
      if (v < u) {
        // already computed from v's side; copy for exact symmetry
        for (const auto& [w, d] : f.neighbors[v])
          if (w == u) f.neighbors[u].emplace_back(v, d);
        continue;
      }
      const double d = std::sqrt(squared_distance(map.codebook.row(u), map.codebook.row(v)));
      f.neighbors[u].emplace_back(v, d);
      f.max_distance = std::max(f.max_distance, d);
    }
  }
  return f;
}

std::vector<std::pair<std::string, double>> codevector_profile(
    const SomMap& map, std::size_t unit, std::span<const std::string> variables) {
  if (unit >= map.units())
    throw DomainError("unit " + std::to_string(unit) + " outside 0.." +
                      std::to_string(map.units() - 1));
  if (variables.size() != map.dim())
    throw DimensionError("expected " + std::to_string(map.dim()) + " variable names, got " +
                         std::to_string(variables.size()));
  std::vector<std::pair<std::string, double>> out;
  const auto row = map.codebook.row(unit);
  for (std::size_t k = 0; k < row.size(); ++k) out.emplace_back(variables[k], row[k]);
  return out;
}

std::string export_class_profiles(const ClassProfile& profile, char delimiter) {
  const std::string d(1, delimiter);
  std::string out = "scope" + d + "class" + d + "records" + d + "variable" + d + "count" + d +
                    "mean" + d + "sd\n";
  auto emit = [&](const std::string& scope, std::size_t cls, std::size_t records,
                  const std::vector<VariableStats>& stats) {
    for (std::size_t j = 0; j < stats.size(); ++j) {
      const auto& s = stats[j];
      out += scope + d + std::to_string(cls) + d + std::to_string(records) + d +
             text::quote_field(profile.variables[j], delimiter) + d + std::to_string(s.count) + d +
             stat_field(s, s.mean) + d + stat_field(s, s.sd) + '\n';
    }
  };
  for (std::size_t c = 0; c < profile.k(); ++c)
    emit("class", c + 1, profile.class_counts[c], profile.classes[c]);
  emit("population", 0, profile.population_count, profile.population);
  return out;
}

std::string export_distributions(std::span<const QualDistribution> distributions, char delimiter) {
  const std::string d(1, delimiter);
  std::string out = "scope" + d + "scope_id" + d + "variable" + d + "modality" + d + "frequency" +
                    d + "count" + d + "empty\n";
  for (const auto& dist : distributions)
    for (std::size_t j = 0; j < dist.modalities.size(); ++j)
      out += std::string(name_of(dist.scope)) + d + std::to_string(dist.scope_id) + d +
             std::string(name_of(dist.variable)) + d + text::quote_field(dist.modalities[j], delimiter) +
             d + text::format_double(dist.frequency[j]) + d + std::to_string(dist.count) + d +
             (dist.empty ? "1" : "0") + '\n';
  return out;
}

std::string export_neighbor_distances(const NeighborDistanceField& field, char delimiter) {
  const std::string d(1, delimiter);
  std::string out = "unit" + d + "neighbor" + d + "distance" + d + "normalized\n";
  for (std::size_t u = 0; u < field.neighbors.size(); ++u)
    for (const auto& [v, dist] : field.neighbors[u])
      out += std::to_string(u) + d + std::to_string(v) + d + text::format_double(dist) + d +
             text::format_double(field.max_distance > 0 ? dist / field.max_distance : 0.0) + '\n';
  return out;
}

}  // namespace unemap
