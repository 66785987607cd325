#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unemap/matrix.hpp"

namespace unemap {

// Rectangular lattice, units numbered row-major. Grid distance is Chebyshev,
// so the 8-neighborhood is exactly the set of units at distance 1.
struct GridTopology {
  std::size_t rows = 10;
  std::size_t cols = 10;

  std::size_t units() const { return rows * cols; }
  std::size_t row_of(std::size_t u) const { return u / cols; }
  std::size_t col_of(std::size_t u) const { return u % cols; }
  std::size_t grid_distance(std::size_t u, std::size_t v) const;
  bool adjacent(std::size_t u, std::size_t v) const { return grid_distance(u, v) == 1; }
  // Units at grid distance 1, ascending.
  std::vector<std::size_t> neighbors(std::size_t u) const;

  friend bool operator==(const GridTopology&, const GridTopology&) = default;
};

enum class TrainingMode { online, batch };
enum class Decay { linear, exponential };
enum class InitStrategy { random_sample, pca_plane };

std::string_view name_of(TrainingMode m);
std::string_view name_of(Decay d);
std::string_view name_of(InitStrategy s);
TrainingMode training_mode_from_name(std::string_view s);
Decay decay_from_name(std::string_view s);
InitStrategy init_strategy_from_name(std::string_view s);

// Gaussian-neighborhood schedule. Radii are kernel widths in grid units; the
// learning rate applies to online mode only. Radius and learning rate move
// from start to end over the epochs (batch) or the individual steps (online).
struct TrainingSchedule {
  TrainingMode mode = TrainingMode::batch;
  std::size_t epochs = 50;
  double radius_start = 5.0;
  double radius_end = 0.0;
  double learning_rate_start = 0.5;
  double learning_rate_end = 0.01;
  Decay decay = Decay::linear;
  std::uint64_t seed = 1;

  void validate() const;
  // Fraction in [0, 1] of the way from start to end.
  double radius_at(double progress) const;
  double learning_rate_at(double progress) const;

  friend bool operator==(const TrainingSchedule&, const TrainingSchedule&) = default;
};

struct EpochStats {
  std::size_t epoch = 0;
  double radius = 0.0;
  double learning_rate = 0.0;  // 0 in batch mode
  double quantization_error = 0.0;
  double distortion = 0.0;  // extended distortion at the epoch's radius
};

struct SomMap {
  GridTopology topology;
  Matrix codebook;  // units x dim
  InitStrategy init = InitStrategy::pca_plane;
  std::uint64_t init_seed = 0;
  TrainingSchedule schedule;
  std::vector<EpochStats> trace;

  std::size_t units() const { return codebook.rows(); }
  std::size_t dim() const { return codebook.cols(); }
};

// Weights below this are treated as zero.
inline constexpr double kNeighborhoodCutoff = 1e-12;

SomMap init_map(const GridTopology& topology, std::size_t dim, const Matrix& data,
                InitStrategy strategy, std::uint64_t seed);

// Nearest code vector by squared Euclidean distance, lowest index on ties.
std::size_t bmu(const SomMap& map, std::span<const double> x);

// exp(-d^2 / (2 sigma^2)) for grid distance d, 0 below the cutoff. sigma must
// be positive; see kernel_matrix for the sigma = 0 limit.
double neighborhood_weight(const GridTopology& topology, std::size_t u, std::size_t v, double sigma);

// units x units neighborhood weights; sigma = 0 gives the identity.
Matrix kernel_matrix(const GridTopology& topology, double sigma);

// Kernel rows normalized to unit mass. Without the normalization, units near
// the border (fewer neighbors, smaller mass) would win the weighted-distortion
// contest for far-away records.
Matrix training_kernel(const GridTopology& topology, double sigma);

// One batch epoch at fixed radius: every code vector becomes the
// kernel-weighted mean of the data under the current winners. Units with zero
// total weight keep their code vector. For sigma > 0 a record's winner is the
// unit minimizing its neighborhood-weighted distortion (see
// extended_distortion), which makes each epoch non-increasing in that energy;
// at sigma = 0 the winner is the BMU and the epoch is a Lloyd step.
void batch_epoch(SomMap& map, const Matrix& data, double sigma);

// One online update of every code vector toward x.
void online_update(SomMap& map, std::span<const double> x, double learning_rate, double sigma);

SomMap train(SomMap map, const Matrix& data, const TrainingSchedule& schedule);

struct Assignment {
  std::vector<std::size_t> unit;    // per record
  std::vector<std::size_t> counts;  // per unit
};

Assignment assign(const SomMap& map, const Matrix& data);

// Mean Euclidean (not squared) distance of records to their BMU.
double quantization_error(const SomMap& map, const Matrix& data);

// Fraction of records whose first and second BMUs are not lattice neighbors.
double topographic_error(const SomMap& map, const Matrix& data);

// Mean over records of min_c sum_u g(c, u) * |x - m_u|^2 with g the
// normalized training kernel; at sigma = 0 the
// mean squared distance to the BMU.
double extended_distortion(const SomMap& map, const Matrix& data, double sigma);

// Per-record winners used by batch training at this radius.
std::vector<std::size_t> batch_winners(const SomMap& map, const Matrix& data, double sigma);

// Versioned text: header lines then one code vector per line at 17
// significant digits, so a write/read cycle is bitwise exact.
std::string serialize_map(const SomMap& map);
SomMap parse_map(std::string_view text);

}  // namespace unemap
