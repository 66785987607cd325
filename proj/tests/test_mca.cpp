#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "unemap/errors.hpp"
#include "unemap/mca.hpp"

using namespace unemap;

namespace {

CategoricalTable table(std::vector<std::vector<std::string>> modalities, std::vector<std::vector<int>> codes) {
  CategoricalTable t;
  for (std::size_t v = 0; v < modalities.size(); ++v) t.variables.push_back("V" + std::to_string(v + 1));
  t.modalities = std::move(modalities);
  t.codes = std::move(codes);
  return t;
}

double eigen_sum(const McaResult& r) {
  double s = 0;
  for (double l : r.eigenvalues) s += l;
  return s;
}

}  // namespace

TEST_CASE("indicator basics") {
  const auto ind = indicator(table({{"a", "b"}}, {{0}, {1}}));
  CHECK(ind.z(0, 0) == 1.0);
  CHECK(ind.z(0, 1) == 0.0);
  CHECK(ind.z(1, 1) == 1.0);

  std::mt19937_64 rng(51);
  const auto t = oracle::random_table(300, {5, 4, 3, 3, 5, 4, 4, 4}, rng);
  const auto big = indicator(t);
  CHECK(big.j() == 32);
  for (std::size_t i = 0; i < big.n(); ++i) {
    double s = 0;
    for (double v : big.z.row(i)) s += v;
    CHECK(s == 8.0);
  }
  for (std::size_t j = 0; j < big.j(); ++j) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < big.n(); ++i)
      count += t.codes[i][big.columns[j].variable] ==
               static_cast<int>(std::find(t.modalities[big.columns[j].variable].begin(),
                                          t.modalities[big.columns[j].variable].end(), big.columns[j].modality) -
                                t.modalities[big.columns[j].variable].begin());
    CHECK(big.column_counts[j] == count);
  }

  auto bad = table({{"a", "b"}}, {{0}, {2}});
  bad.ids = {"r1", "r2"};
  try {
    indicator(bad);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("r2") != std::string::npos);
    CHECK(std::string(e.what()).find("V1") != std::string::npos);
  }
}

TEST_CASE("perfect association gives eigenvalue 1") {
  std::mt19937_64 rng(52);
  std::vector<std::vector<int>> codes;
  for (int i = 0; i < 60; ++i) {
    const int a = static_cast<int>(rng() % 3);
    codes.push_back({a, a});
  }
  const auto r = fit_mca(indicator(table({{"a", "b", "c"}, {"x", "y", "z"}}, codes)), 2);
  CHECK(std::abs(r.eigenvalues[0] - 1.0) < 1e-8);
  CHECK(std::abs(r.eigenvalues[1] - 1.0) < 1e-8);
}

TEST_CASE("independent pair: eigenvalues near one half") {
  std::mt19937_64 rng(53);
  const auto t = oracle::random_table(2000, {3, 3}, rng);
  const auto r = fit_mca(indicator(t), 4);
  for (double l : r.eigenvalues) CHECK(std::abs(l - 0.5) < 0.05);
  const auto ref = oracle::dense_mca(indicator(t).z, 2);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(r.eigenvalues[k] - ref.eigenvalues[k]) < 1e-8);
}

TEST_CASE("property: identities and dense oracle agreement") {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::size_t> mods;
    std::size_t j = 0;
    const std::size_t q = 2 + rng() % 3;
    for (std::size_t v = 0; v < q; ++v) {
      mods.push_back(2 + rng() % 3);
      j += mods.back();
    }
    if (j > 12) continue;
    const auto t = oracle::random_table(10 + rng() % 91, mods, rng);
    const auto ind = indicator(t);
    const std::size_t kept_j = static_cast<std::size_t>(std::count_if(
        ind.column_counts.begin(), ind.column_counts.end(), [](std::size_t c) { return c > 0; }));
    const std::size_t dims = kept_j - q;
    const auto r = fit_mca(ind, dims);
    CHECK(std::abs(eigen_sum(r) - static_cast<double>(dims) / static_cast<double>(q)) < 1e-8);
    for (double l : r.eigenvalues) {
      CHECK(l >= 0.0);
      CHECK(l <= 1.0 + 1e-12);
    }
    for (std::size_t k = 0; k < dims; ++k) {
      double centre = 0;
      for (std::size_t c = 0; c < r.columns.size(); ++c) centre += r.masses[c] * r.column_coordinates(c, k);
      CHECK(std::abs(centre) < 1e-8);
    }

    if (kept_j != ind.j()) continue;  // oracle below works on the full indicator
    const auto ref = oracle::dense_mca(ind.z, q);
    for (std::size_t k = 0; k < dims; ++k) CHECK(std::abs(r.eigenvalues[k] - ref.eigenvalues[k]) < 1e-8);
    for (std::size_t k = 0; k < dims; ++k) {
      // coordinates are defined up to sign only on simple eigenvalues
      const double gap_prev = k == 0 ? 1.0 : r.eigenvalues[k - 1] - r.eigenvalues[k];
      const double gap_next = k + 1 < dims ? r.eigenvalues[k] - r.eigenvalues[k + 1] : 1.0;
      if (std::min(gap_prev, gap_next) < 1e-5 || r.eigenvalues[k] < 1e-10) continue;
      double dot = 0;
      for (std::size_t c = 0; c < kept_j; ++c) dot += r.column_coordinates(c, k) * ref.column_coordinates(c, k);
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (std::size_t c = 0; c < kept_j; ++c)
        CHECK(std::abs(r.column_coordinates(c, k) - sign * ref.column_coordinates(c, k)) < 1e-8);
    }
  }
}

TEST_CASE("duplicating records leaves the analysis unchanged") {
  std::mt19937_64 rng(55);
  const auto t = oracle::random_table(80, {3, 4, 2}, rng);
  auto doubled = t;
  doubled.codes.insert(doubled.codes.end(), t.codes.begin(), t.codes.end());
  const auto a = fit_mca(indicator(t), 3);
  const auto b = fit_mca(indicator(doubled), 3);
  for (std::size_t k = 0; k < a.eigenvalues.size(); ++k)
    CHECK(std::abs(a.eigenvalues[k] - b.eigenvalues[k]) < 1e-9);
  for (std::size_t c = 0; c < a.columns.size(); ++c)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(std::abs(a.column_coordinates(c, k) - b.column_coordinates(c, k)) < 1e-9);
}

TEST_CASE("row coordinates follow the transition formula") {
  std::mt19937_64 rng(56);
  const auto t = oracle::random_table(120, {3, 4, 2}, rng);
  const auto ind = indicator(t);
  const auto r = fit_mca(ind, 3);
  for (std::size_t i = 0; i < 120; ++i)
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0;
      for (std::size_t c = 0; c < ind.j(); ++c)
        if (ind.z(i, c) != 0) s += r.column_coordinates(c, k);
      CHECK(std::abs(r.row_coordinates(i, k) - s / (3.0 * std::sqrt(r.eigenvalues[k]))) < 1e-9);
    }
}

TEST_CASE("sign convention, empty modalities and axis errors") {
  std::mt19937_64 rng(57);
  auto t = oracle::random_table(50, {3, 3}, rng);
  t.modalities[1].push_back("unused");
  const auto r = fit_mca(indicator(t), 2);
  CHECK(r.warnings.size() == 1);
  CHECK(r.columns.size() == 6);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t c = 0; c < r.columns.size(); ++c)
      if (std::abs(r.column_coordinates(c, k)) > 1e-10) {
        CHECK(r.column_coordinates(c, k) > 0);
        break;
      }
  try {
    fit_mca(indicator(t), 5);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("J-Q = 4") != std::string::npos);
  }

  const auto p12 = modality_coordinates(r, 1, 2);
  const auto p21 = modality_coordinates(r, 2, 1);
  REQUIRE(p12.size() == 6);
  for (std::size_t c = 0; c < p12.size(); ++c) {
    CHECK(p12[c].x == p21[c].y);
    CHECK(p12[c].y == p21[c].x);
  }
  CHECK_THROWS(modality_coordinates(r, 1, 3));
  CHECK_THROWS(modality_coordinates(r, 0, 1));
}

TEST_CASE("exports") {
  std::mt19937_64 rng(58);
  const auto r = fit_mca(indicator(oracle::random_table(40, {3, 2}, rng)), 2);
  const auto c = export_modality_coordinates(r);
  CHECK(c.rfind("variable,modality,axis_1,axis_2,mass,contribution_1,contribution_2\n", 0) == 0);
  const auto e = export_eigenvalues(r);
  CHECK(e.find("cumulative_pct") != std::string::npos);
  double contrib = 0;
  for (std::size_t j = 0; j < r.columns.size(); ++j) contrib += r.contributions(j, 0);
  CHECK(contrib == doctest::Approx(1.0));
}
