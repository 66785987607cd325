#include "unemap/som_kernels.hpp"

#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace unemap::kernels {

namespace {

inline std::size_t nearest(const Matrix& codebook, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < codebook.rows(); ++u) {
    const double d = squared_distance(codebook.row(u), x);
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  return best;
}

inline BmuPair nearest_two(const Matrix& codebook, std::span<const double> x) {
  BmuPair p{0, 1};
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (std::size_t u = 0; u < codebook.rows(); ++u) {
    const double d = squared_distance(codebook.row(u), x);
    if (d < d1) {
      d2 = d1;
      p.second = p.first;
      d1 = d;
      p.first = u;
    } else if (d < d2) {
      d2 = d;
      p.second = u;
    }
  }
  return p;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void bmu_serial(const Matrix& codebook, const Matrix& data, std::span<std::size_t> out) {
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = nearest(codebook, data.row(i));
}

void bmu_parallel(const Matrix& codebook, const Matrix& data, std::span<std::size_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = nearest(codebook, data.row(i));
}

void two_bmu_serial(const Matrix& codebook, const Matrix& data, std::span<BmuPair> out) {
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = nearest_two(codebook, data.row(i));
}

void two_bmu_parallel(const Matrix& codebook, const Matrix& data, std::span<BmuPair> out) {
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = nearest_two(codebook, data.row(i));
}

Matrix batch_update_serial(const Matrix& codebook, const Matrix& data,
                           std::span<const std::size_t> bmu, const Matrix& kernel) {
  const std::size_t units = codebook.rows();
  const std::size_t dim = codebook.cols();
  Matrix num(units, dim);
  std::vector<double> den(units, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    for (std::size_t u = 0; u < units; ++u) {
      const double h = kernel(bmu[i], u);
      if (h == 0.0) continue;
      den[u] += h;
      auto acc = num.row(u);
      for (std::size_t k = 0; k < dim; ++k) acc[k] += h * x[k];
    }
  }
  Matrix out = codebook;
  for (std::size_t u = 0; u < units; ++u) {
    if (den[u] <= 0.0) continue;
    for (std::size_t k = 0; k < dim; ++k) out(u, k) = num(u, k) / den[u];
  }
  return out;
}

Matrix batch_update_parallel(const Matrix& codebook, const Matrix& data,
                             std::span<const std::size_t> bmu, const Matrix& kernel) {
  const std::size_t units = codebook.rows();
  const std::size_t dim = codebook.cols();

  // Per-winner sums in record order; O(n * dim) and order-fixed.
  Matrix sums(units, dim);
  std::vector<double> hits(units, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto s = sums.row(bmu[i]);
    const auto x = data.row(i);
    for (std::size_t k = 0; k < dim; ++k) s[k] += x[k];
    hits[bmu[i]] += 1.0;
  }

  Matrix out = codebook;
  const auto n_units = static_cast<std::ptrdiff_t>(units);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t u = 0; u < n_units; ++u) {
    double den = 0.0;
    std::vector<double> num(dim, 0.0);
    for (std::size_t c = 0; c < units; ++c) {
      const double h = kernel(c, static_cast<std::size_t>(u));
      if (h == 0.0 || hits[c] == 0.0) continue;
      den += h * hits[c];
      const auto s = sums.row(c);
      for (std::size_t k = 0; k < dim; ++k) num[k] += h * s[k];
    }
    if (den <= 0.0) continue;
    for (std::size_t k = 0; k < dim; ++k) out(static_cast<std::size_t>(u), k) = num[k] / den;
  }
  return out;
}

void local_winner_serial(const Matrix& codebook, const Matrix& data, const Matrix& kernel,
                         std::span<std::size_t> winner, std::span<double> local) {
  const std::size_t units = codebook.rows();
  std::vector<double> d(units);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.row(i);
    for (std::size_t u = 0; u < units; ++u) d[u] = squared_distance(codebook.row(u), x);
    std::size_t best = 0;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < units; ++c) {
      double e = 0.0;
      for (std::size_t u = 0; u < units; ++u) e += kernel(c, u) * d[u];
      if (e < best_e) {
        best_e = e;
        best = c;
      }
    }
    winner[i] = best;
    local[i] = best_e;
  }
}

void local_winner_parallel(const Matrix& codebook, const Matrix& data, const Matrix& kernel,
                           std::span<std::size_t> winner, std::span<double> local) {
  const std::size_t units = codebook.rows();
  const std::size_t dim = codebook.cols();

  // sum_u h(c,u) |x - m_u|^2 = mass_c |x|^2 - 2 x . pull_c + energy_c
  std::vector<double> mass(units, 0.0), energy(units, 0.0);
  Matrix pull(units, dim);
  for (std::size_t c = 0; c < units; ++c) {
    auto p = pull.row(c);
    for (std::size_t u = 0; u < units; ++u) {
      const double h = kernel(c, u);
      if (h == 0.0) continue;
      const auto m = codebook.row(u);
      mass[c] += h;
      double norm = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        p[k] += h * m[k];
        norm += m[k] * m[k];
      }
      energy[c] += h * norm;
    }
  }

  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto x = data.row(static_cast<std::size_t>(i));
    double xx = 0.0;
    for (double v : x) xx += v * v;
    std::size_t best = 0;
    double best_e = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < units; ++c) {
      const auto p = pull.row(c);
      double dot = 0.0;
      for (std::size_t k = 0; k < dim; ++k) dot += x[k] * p[k];
      const double e = mass[c] * xx - 2.0 * dot + energy[c];
      if (e < best_e) {
        best_e = e;
        best = c;
      }
    }
    winner[static_cast<std::size_t>(i)] = best;
    local[static_cast<std::size_t>(i)] = std::max(0.0, best_e);
  }
}

void bmu_distances(const Matrix& codebook, const Matrix& data, std::span<const std::size_t> bmu,
                   std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = squared_distance(codebook.row(bmu[i]), data.row(i));
}

}  // namespace unemap::kernels
