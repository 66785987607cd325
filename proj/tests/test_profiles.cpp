#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "unemap/errors.hpp"
#include "unemap/profiles.hpp"

using namespace unemap;

TEST_CASE("hand case class profiles") {
  Matrix v(3, 2);
  v(0, 0) = 0, v(0, 1) = 0, v(1, 0) = 2, v(1, 1) = 2, v(2, 0) = 10, v(2, 1) = 10;
  const std::vector<int> labels = {1, 1, 2};
  const auto p = class_profiles(v, labels, 3, {"a", "b"});
  CHECK(p.classes[0][0].mean == 1.0);
  CHECK(p.classes[0][1].sd == 1.0);
  CHECK(p.classes[1][0].mean == 10.0);
  CHECK(p.classes[1][0].sd == 0.0);
  CHECK(p.class_counts[2] == 0);
  CHECK_FALSE(p.classes[2][0].defined);
  CHECK(p.class_counts[0] + p.class_counts[1] + p.class_counts[2] == p.population_count);
  CHECK(export_class_profiles(p).find("NA") != std::string::npos);
  CHECK_THROWS_AS(class_profiles(v, std::vector<int>{1, 2}, 2, {"a", "b"}), DimensionError);
}

TEST_CASE("population column equals direct statistics; order invariance") {
  std::mt19937_64 rng(41);
  auto v = oracle::random_matrix(500, 3, rng, 5.0);
  v(7, 1) = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> labels(500);
  for (auto& l : labels) l = 1 + static_cast<int>(rng() % 4);
  const auto p = class_profiles(v, labels, 4, {"x", "y", "z"});
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0, n = 0;
    for (std::size_t i = 0; i < 500; ++i)
      if (!std::isnan(v(i, j))) s += v(i, j), n += 1;
    const double mean = s / n;
    double ss = 0;
    for (std::size_t i = 0; i < 500; ++i)
      if (!std::isnan(v(i, j))) ss += (v(i, j) - mean) * (v(i, j) - mean);
    CHECK(std::abs(p.population[j].mean - mean) < 1e-9);
    CHECK(std::abs(p.population[j].sd - std::sqrt(ss / n)) < 1e-9);
    CHECK(p.population[j].count == static_cast<std::size_t>(n));
  }

  Matrix rev(500, 3);
  std::vector<int> rl(500);
  for (std::size_t i = 0; i < 500; ++i) {
    for (std::size_t j = 0; j < 3; ++j) rev(i, j) = v(499 - i, j);
    rl[i] = labels[499 - i];
  }
  const auto q = class_profiles(rev, rl, 4, {"x", "y", "z"});
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(q.classes[c][j].mean == doctest::Approx(p.classes[c][j].mean).epsilon(1e-12));
      CHECK(q.classes[c][j].sd == doctest::Approx(p.classes[c][j].sd).epsilon(1e-12));
    }
}

TEST_CASE("qualitative distributions") {
  const auto coding = CodingSpec::standard();
  const auto har = static_cast<std::size_t>(Qual::HAR);
  std::vector<std::array<int, kQualCount>> mods(6);
  for (auto& m : mods) m.fill(0);
  mods[3][har] = 2, mods[4][har] = 4, mods[5][har] = 4;
  const std::vector<int> cls = {1, 1, 1, 2, 2, 2};
  const std::vector<int> ids = {1, 2, 3};
  const auto d = qualitative_distribution(mods, cls, ids, Scope::broad_class, Qual::HAR, coding);
  REQUIRE(d.size() == 4);
  CHECK(d[0].frequency[0] == 1.0);  // every record in class 1 has HAR "0"
  CHECK(d[0].modalities[0] == "0");
  CHECK(d[1].frequency[4] == doctest::Approx(2.0 / 3.0));
  CHECK(d[2].empty);
  CHECK(d[3].scope == Scope::population);
  CHECK(d[3].count == 6);

  mods[0][har] = 9;
  CHECK_THROWS_AS(qualitative_distribution(mods, cls, ids, Scope::broad_class, Qual::HAR, coding),
                  DomainError);
}

TEST_CASE("property: frequencies sum to one and cells aggregate to classes") {
  const auto coding = CodingSpec::standard();
  std::mt19937_64 rng(42);
  const std::size_t n = 800, units = 16;
  std::vector<std::array<int, kQualCount>> mods(n);
  std::vector<int> unit(n), cls(n);
  std::vector<int> unit_class(units);
  for (auto& c : unit_class) c = 1 + static_cast<int>(rng() % 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t q = 0; q < kQualCount; ++q)
      mods[i][q] = static_cast<int>(rng() % coding.modality_labels(static_cast<Qual>(q)).size());
    unit[i] = static_cast<int>(rng() % (units - 2));  // two cells stay empty
    cls[i] = unit_class[static_cast<std::size_t>(unit[i])];
  }
  std::vector<int> cell_ids(units), class_ids = {1, 2, 3};
  for (std::size_t u = 0; u < units; ++u) cell_ids[u] = static_cast<int>(u);
  for (std::size_t q = 0; q < kQualCount; ++q) {
    const auto v = static_cast<Qual>(q);
    const auto cells = qualitative_distribution(mods, unit, cell_ids, Scope::grid_cell, v, coding);
    const auto classes = qualitative_distribution(mods, cls, class_ids, Scope::broad_class, v, coding);
    CHECK(cells[units - 1].empty);
    for (const auto& d : cells) {
      if (d.empty) continue;
      double s = 0;
      for (double f : d.frequency) s += f;
      CHECK(std::abs(s - 1.0) < 1e-9);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (classes[c].empty) continue;
      std::vector<double> agg(classes[c].frequency.size(), 0.0);
      for (std::size_t u = 0; u < units; ++u) {
        if (unit_class[u] != static_cast<int>(c + 1) || cells[u].empty) continue;
        for (std::size_t j = 0; j < agg.size(); ++j)
          agg[j] += cells[u].frequency[j] * static_cast<double>(cells[u].count) / static_cast<double>(classes[c].count);
      }
      for (std::size_t j = 0; j < agg.size(); ++j) CHECK(std::abs(agg[j] - classes[c].frequency[j]) < 1e-9);
    }
  }
}

TEST_CASE("neighbor distances") {
  SomMap m;
  m.topology = {10, 10};
  m.codebook = Matrix(100, 3);
  auto f = neighbor_distances(m);
  CHECK(f.max_distance == 0.0);
  CHECK(f.neighbors[0].size() == 3);
  CHECK(f.neighbors[5].size() == 5);
  CHECK(f.neighbors[55].size() == 8);
  for (const auto& l : f.neighbors)
    for (const auto& [_, d] : l) CHECK(d == 0.0);

  SomMap line;
  line.topology = {1, 6};
  line.codebook = Matrix(6, 2);
  for (std::size_t u = 0; u < 6; ++u) line.codebook(u, 0) = 0.5 * static_cast<double>(u);
  f = neighbor_distances(line);
  for (std::size_t u = 0; u + 1 < 6; ++u) CHECK(f.neighbors[u].back().second == doctest::Approx(0.5));

  std::mt19937_64 rng(43);
  m.codebook = oracle::random_matrix(100, 3, rng);
  f = neighbor_distances(m);
  for (std::size_t u = 0; u < 100; ++u)
    for (const auto& [v, d] : f.neighbors[u]) {
      bool found = false;
      for (const auto& [w, e] : f.neighbors[v])
        if (w == u) {
          found = true;
          CHECK(e == d);
        }
      CHECK(found);
      CHECK(d <= f.max_distance);
    }
}

TEST_CASE("code-vector profile") {
  SomMap m;
  m.topology = {2, 2};
  m.codebook = Matrix(4, 10);
  std::vector<std::string> names;
  for (Quant q : kFeatureOrder) names.emplace_back(name_of(q));
  const auto p = codevector_profile(m, 3, names);
  CHECK(p.size() == 10);
  for (const auto& [_, v] : p) CHECK(v == 0.0);
  CHECK(p[0].first == "AGE");
  CHECK_THROWS_AS(codevector_profile(m, 4, names), DomainError);
  CHECK_THROWS_AS(codevector_profile(m, 0, std::span(names).first(3)), DimensionError);
}
