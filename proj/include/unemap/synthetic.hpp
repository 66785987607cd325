#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "unemap/dataset.hpp"

namespace unemap {

struct Dispersion {
  double mean = 0.0;
  double sd = 0.0;
};

using ProbabilityRows = std::array<std::array<double, 4>, 4>;

// One planted macro-class of the synthetic cohort.
struct ClassSpec {
  std::string name;
  double proportion = 0.0;
  std::array<Dispersion, kQuantCount> quant{};
  std::array<double, 3> dipl3{};
  // Registration cause of the first spell.
  std::array<double, 4> first_registration{};
  // Exit type of a spell that is followed by a new registration.
  std::array<double, 4> reentry_exit{};
  // Exit type of the last observed spell, conditional on its registration cause.
  ProbabilityRows registration_to_exit{};
  // Registration cause of the next spell, conditional on the previous exit.
  ProbabilityRows exit_to_registration{};
};

struct SyntheticSpec {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<ClassSpec> classes;

  // Throws DomainError when proportions do not sum to 1, a dispersion is
  // negative or a probability vector is degenerate.
  void validate() const;
};

// Five classes with the reference class sizes, per-class means and standard
// deviations, and the reference transition row shares.
SyntheticSpec reference_cohort_spec(std::size_t n, std::uint64_t seed);

struct SyntheticCohort {
  std::vector<SpellRecord> spells;
  std::vector<std::string> individual_ids;
  std::vector<int> planted_class;  // 1-based, parallel to individual_ids
};

// Gaussian marginals censored at the domain bounds, NCHOM rounded to an
// integer >= 2, independent categorical draws. Class sizes follow the
// proportions exactly (largest remainder), in seeded random order.
SyntheticCohort generate_synthetic(const SyntheticSpec& spec);

std::string serialize_truth(const SyntheticCohort& cohort);

}  // namespace unemap
