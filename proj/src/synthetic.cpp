#include "unemap/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "unemap/errors.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

namespace {

struct Bounds {
  double lo;
  double hi;
};

Bounds domain_of(Quant q) {
  switch (q) {
    case Quant::AGE: return {16.0, 70.0};
    case Quant::CPPAR: return {0.0, 1.0};
    case Quant::NCHOM: return {2.0, HUGE_VAL};
    default: return {0.0, HUGE_VAL};
  }
}

void check_probabilities(std::span<const double> p, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DomainError(what + ": negative probability");
    total += v;
  }
  if (!(total > 0.0)) throw DomainError(what + ": probabilities sum to zero");
}

template <std::size_t N>
int draw(std::mt19937_64& rng, const std::array<double, N>& p) {
  std::discrete_distribution<int> d(p.begin(), p.end());
  return d(rng) + 1;
}

// Exact class sizes by largest remainder.
std::vector<std::size_t> allocate(std::size_t n, const std::vector<ClassSpec>& classes) {
  std::vector<std::size_t> counts(classes.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double exact = static_cast<double>(n) * classes[c].proportion;
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[remainders[i % remainders.size()].second];
  return counts;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (classes.empty()) throw DomainError("synthetic spec has no classes");
  double total = 0.0;
  for (const auto& c : classes) {
    if (!(c.proportion >= 0.0)) throw DomainError(c.name + ": negative proportion");
    total += c.proportion;
    for (std::size_t q = 0; q < kQuantCount; ++q) {
      if (!(c.quant[q].sd >= 0.0))
        throw DomainError(c.name + ": negative dispersion for " + std::string(kQuantNames[q]));
      if (!std::isfinite(c.quant[q].mean))
        throw DomainError(c.name + ": non-finite mean for " + std::string(kQuantNames[q]));
    }
    check_probabilities(c.dipl3, c.name + " DIPL3");
    check_probabilities(c.first_registration, c.name + " first registration");
    check_probabilities(c.reentry_exit, c.name + " re-entry exit");
    for (const auto& row : c.registration_to_exit) check_probabilities(row, c.name + " registration->exit");
    for (const auto& row : c.exit_to_registration) check_probabilities(row, c.name + " exit->registration");
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("class proportions must sum to 1");
}

SyntheticSpec reference_cohort_spec(std::size_t n, std::uint64_t seed) {
  // Row shares of the registration -> exit and exit -> registration tables.
  const ProbabilityRows reg_to_exit = {{{59.08, 3.45, 13.71, 23.75},
                                        {62.67, 3.35, 12.72, 21.26},
                                        {70.29, 2.50, 12.31, 14.90},
                                        {75.51, 3.72, 8.87, 11.90}}};
  const ProbabilityRows exit_to_reg = {{{34.62, 52.66, 5.86, 6.86},
                                        {48.22, 38.22, 3.56, 10.00},
                                        {56.11, 34.79, 3.93, 5.18},
                                        {50.76, 36.75, 4.49, 8.00}}};
  // Exit margins of spells that are followed by a new registration.
  const std::array<double, 4> reentry = {78.23, 1.79, 13.96, 6.01};

  constexpr double kTotal = 19246.0;
  struct Row {
    const char* name;
    double count;
    // AGE CMDUR CPPAR DUR EXPER INDUR MGAIN MXMHEUR NCHOM TINDMOY SRREVAL
    std::array<Dispersion, kQuantCount> quant;
    std::array<double, 3> dipl3;
    std::array<double, 4> first_registration;
  };
  const std::array<Row, 5> rows = {{
      {"class 1", 7908,
       {{{28.78, 8.01}, {12.94, 9.80}, {0.03, 0.06}, {116.47, 96.95}, {2.51, 3.36},
         {82.42, 131.35}, {29.07, 254.73}, {2.01, 9.53}, {2.22, 0.42}, {44.61, 59.80},
         {215.52, 124.31}}},
       {0.30, 0.30, 0.40},
       {0.15, 0.30, 0.10, 0.45}},
      {"class 2", 3793,
       {{{29.82, 8.06}, {24.27, 19.84}, {0.31, 0.20}, {281.94, 200.50}, {3.81, 5.31},
         {169.03, 202.03}, {4612.14, 4386.92}, {127.88, 51.14}, {2.26, 0.52}, {79.99, 80.45},
         {263.19, 215.08}}},
       {0.25, 0.30, 0.45},
       {0.25, 0.55, 0.08, 0.12}},
      {"class 3", 4519,
       {{{34.80, 9.25}, {39.01, 20.00}, {0.04, 0.08}, {424.80, 253.95}, {4.15, 5.25},
         {438.93, 414.16}, {334.47, 1124.81}, {19.04, 44.06}, {2.13, 0.34}, {79.22, 63.52},
         {223.60, 191.18}}},
       {0.20, 0.25, 0.55},
       {0.45, 0.35, 0.10, 0.10}},
      {"class 4", 877,
       {{{29.42, 8.16}, {22.23, 13.24}, {0.05, 0.09}, {112.97, 114.94}, {2.88, 4.05},
         {121.49, 182.21}, {126.66, 774.76}, {11.92, 32.25}, {4.36, 0.69}, {44.00, 58.51},
         {230.71, 191.50}}},
       {0.25, 0.30, 0.45},
       {0.30, 0.55, 0.08, 0.07}},
      {"class 5", 2149,
       {{{44.78, 8.03}, {23.61, 17.63}, {0.05, 0.09}, {192.00, 155.37}, {16.79, 8.82},
         {332.64, 245.01}, {204.58, 944.29}, {13.32, 36.32}, {2.25, 0.49}, {202.64, 155.71},
         {439.40, 325.71}}},
       {0.15, 0.20, 0.65},
       {0.55, 0.30, 0.10, 0.05}},
  }};

  SyntheticSpec spec;
  spec.n = n;
  spec.seed = seed;
  for (const auto& r : rows) {
    ClassSpec c;
    c.name = r.name;
    c.proportion = r.count / kTotal;
    c.quant = r.quant;
    c.dipl3 = r.dipl3;
    c.first_registration = r.first_registration;
    c.reentry_exit = reentry;
    c.registration_to_exit = reg_to_exit;
    c.exit_to_registration = exit_to_reg;
    spec.classes.push_back(std::move(c));
  }
  return spec;
}

SyntheticCohort generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  const auto counts = allocate(spec.n, spec.classes);
  std::vector<int> labels;
  labels.reserve(spec.n);
  for (std::size_t c = 0; c < counts.size(); ++c) labels.insert(labels.end(), counts[c], static_cast<int>(c + 1));
  std::shuffle(labels.begin(), labels.end(), rng);

  auto sample = [&](Quant q, const Dispersion& d) {
    std::normal_distribution<double> normal(d.mean, d.sd > 0 ? d.sd : 1.0);
    double v = d.sd > 0 ? normal(rng) : d.mean;
    if (q == Quant::NCHOM) v = std::round(v);
    const auto b = domain_of(q);
    return std::clamp(v, b.lo, b.hi);
  };

  SyntheticCohort cohort;
  cohort.planted_class = labels;
  cohort.individual_ids.reserve(spec.n);
  const int width = static_cast<int>(std::to_string(std::max<std::size_t>(spec.n, 1)).size());
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto& cls = spec.classes[static_cast<std::size_t>(labels[i] - 1)];
    char id[32];
    std::snprintf(id, sizeof(id), "S%0*zu", width, i + 1);
    cohort.individual_ids.emplace_back(id);

    SpellRecord base;
    base.individual_id = id;
    for (std::size_t q = 0; q < kQuantCount; ++q) base.quant[q] = sample(static_cast<Quant>(q), cls.quant[q]);
    base.dipl3 = draw(rng, cls.dipl3);
    const int spells = static_cast<int>(*base.get(Quant::NCHOM));

    int registration = draw(rng, cls.first_registration);
    for (int s = 1; s <= spells; ++s) {
      SpellRecord rec = base;
      rec.spell_index = s;
      rec.rmotifi = registration;
      if (s < spells) {
        rec.set(Quant::DUR, sample(Quant::DUR, cls.quant[static_cast<std::size_t>(Quant::DUR)]));
        rec.rmotifa = draw(rng, cls.reentry_exit);
        registration = draw(rng, cls.exit_to_registration[static_cast<std::size_t>(*rec.rmotifa - 1)]);
      } else {
        rec.rmotifa = draw(rng, cls.registration_to_exit[static_cast<std::size_t>(registration - 1)]);
      }
      if (rec.rmotifi == 4) rec.set(Quant::SRREVAL, std::nullopt);
      cohort.spells.push_back(std::move(rec));
    }
  }
  return cohort;
}

std::string serialize_truth(const SyntheticCohort& cohort) {
  std::string out = "individual_id,planted_class\n";
  for (std::size_t i = 0; i < cohort.individual_ids.size(); ++i)
    out += cohort.individual_ids[i] + "," + std::to_string(cohort.planted_class[i]) + "\n";
  return out;
}

}  // namespace unemap
