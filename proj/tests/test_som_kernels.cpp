#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "doctest.h"
#include "oracles.hpp"
#include "unemap/som.hpp"
#include "unemap/som_kernels.hpp"

using namespace unemap;
using namespace unemap::kernels;

namespace {

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace

TEST_CASE("parallel kernels equal their serial references") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t units = 4 + rng() % 60, n = 1 + rng() % 500, dim = 1 + rng() % 12;
    const auto cb = oracle::random_matrix(units, dim, rng);
    const auto data = oracle::random_matrix(n, dim, rng);
    const GridTopology g{units / 4, 4};
    const auto cbu = oracle::random_matrix(g.units(), dim, rng);

    std::vector<std::size_t> s(n), p(n);
    bmu_serial(cb, data, s);
    bmu_parallel(cb, data, p);
    CHECK(s == p);

    std::vector<BmuPair> s2(n), p2(n);
    two_bmu_serial(cb, data, s2);
    two_bmu_parallel(cb, data, p2);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(s2[i].first == p2[i].first);
      CHECK(s2[i].second == p2[i].second);
      CHECK(s2[i].first == s[i]);
      CHECK(s2[i].first != s2[i].second);
    }

    const auto kernel = training_kernel(g, 0.5 + static_cast<double>(rng() % 40) / 10.0);
    std::vector<std::size_t> wu(n);
    bmu_serial(cbu, data, wu);
    const auto us = batch_update_serial(cbu, data, wu, kernel);
    const auto up = batch_update_parallel(cbu, data, wu, kernel);
    for (std::size_t i = 0; i < us.values().size(); ++i)
      CHECK(us.values()[i] == doctest::Approx(up.values()[i]).epsilon(1e-12));

    std::vector<std::size_t> ws(n), wp(n);
    std::vector<double> ls(n), lp(n);
    local_winner_serial(cbu, data, kernel, ws, ls);
    local_winner_parallel(cbu, data, kernel, wp, lp);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ls[i] == doctest::Approx(lp[i]).epsilon(1e-9));
      // the expansion may pick a different unit only on a near tie
      if (ws[i] != wp[i]) {
        double e = 0;
        for (std::size_t u = 0; u < g.units(); ++u) e += kernel(wp[i], u) * squared_distance(cbu.row(u), data.row(i));
        CHECK(e == doctest::Approx(ls[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("parallel kernels are bitwise independent of the thread count") {
  std::mt19937_64 rng(22);
  const GridTopology g{10, 10};
  const auto cb = oracle::random_matrix(g.units(), 10, rng);
  const auto data = oracle::random_matrix(3000, 10, rng);
  const auto kernel = training_kernel(g, 2.0);

  std::vector<std::vector<std::size_t>> winners;
  std::vector<Matrix> updates;
  for (int threads : {1, 2, 3, 8}) {
    set_threads(threads);
    std::vector<std::size_t> w(data.rows());
    std::vector<double> l(data.rows());
    local_winner_parallel(cb, data, kernel, w, l);
    winners.push_back(w);
    updates.push_back(batch_update_parallel(cb, data, w, kernel));
  }
  for (std::size_t i = 1; i < winners.size(); ++i) {
    CHECK(winners[i] == winners[0]);
    CHECK(updates[i] == updates[0]);
  }

  std::vector<Matrix> maps;
  for (int threads : {1, 4}) {
    set_threads(threads);
    auto m = init_map(g, 10, data, InitStrategy::pca_plane, 0);
    TrainingSchedule s;
    s.epochs = 6;
    maps.push_back(train(m, data, s).codebook);
  }
  CHECK(maps[0] == maps[1]);
  set_threads(max_threads());
}

TEST_CASE("units without weight keep their vector") {
  Matrix cb(3, 1);
  cb(0, 0) = 0;
  cb(1, 0) = 5;
  cb(2, 0) = 9;
  Matrix data(2, 1);
  data(0, 0) = 1;
  data(1, 0) = 2;
  const std::vector<std::size_t> w = {0, 0};
  const auto id = training_kernel({1, 3}, 0.0);
  const auto out = batch_update_parallel(cb, data, w, id);
  CHECK(out(0, 0) == 1.5);
  CHECK(out(1, 0) == 5);
  CHECK(out(2, 0) == 9);
  CHECK(batch_update_serial(cb, data, w, id) == out);
}
