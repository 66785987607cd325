#pragma once

// Data-parallel inner loops of SOM training. Every kernel has a serial
// reference and an OpenMP version; the parallel versions give bitwise the same
// result for any thread count.

#include <cstddef>
#include <span>

#include "unemap/matrix.hpp"

namespace unemap::kernels {

struct BmuPair {
  std::size_t first = 0;
  std::size_t second = 0;
};

void bmu_serial(const Matrix& codebook, const Matrix& data, std::span<std::size_t> out);
void bmu_parallel(const Matrix& codebook, const Matrix& data, std::span<std::size_t> out);

// Requires at least two code vectors.
void two_bmu_serial(const Matrix& codebook, const Matrix& data, std::span<BmuPair> out);
void two_bmu_parallel(const Matrix& codebook, const Matrix& data, std::span<BmuPair> out);

// New codebook for one batch epoch. `kernel` is units x units; `bmu` holds the
// winner of each record. Units with zero total weight copy the old vector.
Matrix batch_update_serial(const Matrix& codebook, const Matrix& data,
                           std::span<const std::size_t> bmu, const Matrix& kernel);
Matrix batch_update_parallel(const Matrix& codebook, const Matrix& data,
                             std::span<const std::size_t> bmu, const Matrix& kernel);

// Winner under the neighborhood-weighted distortion: the unit c minimizing
// sum_u kernel(c, u) * |x - m_u|^2, lowest index on ties. `local` receives that
// minimum per record. The serial reference evaluates the double sum directly;
// the parallel version expands the square around per-unit kernel sums, which
// costs units * dim per record instead of units^2 * dim.
void local_winner_serial(const Matrix& codebook, const Matrix& data, const Matrix& kernel,
                         std::span<std::size_t> winner, std::span<double> local);
void local_winner_parallel(const Matrix& codebook, const Matrix& data, const Matrix& kernel,
                           std::span<std::size_t> winner, std::span<double> local);

// Per-record squared distance to the assigned unit.
void bmu_distances(const Matrix& codebook, const Matrix& data, std::span<const std::size_t> bmu,
                   std::span<double> out);

int max_threads();

}  // namespace unemap::kernels
