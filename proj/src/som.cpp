#include "unemap/som.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "unemap/errors.hpp"
#include "unemap/som_kernels.hpp"
#include "unemap/text_io.hpp"

namespace unemap {

std::size_t GridTopology::grid_distance(std::size_t u, std::size_t v) const {
  const auto dr = row_of(u) > row_of(v) ? row_of(u) - row_of(v) : row_of(v) - row_of(u);
  const auto dc = col_of(u) > col_of(v) ? col_of(u) - col_of(v) : col_of(v) - col_of(u);
  return std::max(dr, dc);
}

std::vector<std::size_t> GridTopology::neighbors(std::size_t u) const {
  std::vector<std::size_t> out;
  const auto r = static_cast<std::ptrdiff_t>(row_of(u));
  const auto c = static_cast<std::ptrdiff_t>(col_of(u));
  for (std::ptrdiff_t dr = -1; dr <= 1; ++dr)
    for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      const auto rr = r + dr, cc = c + dc;
      if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(rows) ||
          cc >= static_cast<std::ptrdiff_t>(cols))
        continue;
      out.push_back(static_cast<std::size_t>(rr) * cols + static_cast<std::size_t>(cc));
    }
  return out;
}

std::string_view name_of(TrainingMode m) { return m == TrainingMode::batch ? "batch" : "online"; }
std::string_view name_of(Decay d) { return d == Decay::linear ? "linear" : "exponential"; }
std::string_view name_of(InitStrategy s) {
  return s == InitStrategy::pca_plane ? "pca_plane" : "random_sample";
}

TrainingMode training_mode_from_name(std::string_view s) {
  if (s == "batch") return TrainingMode::batch;
  if (s == "online") return TrainingMode::online;
  throw DomainError("unknown training mode '" + std::string(s) + "'");
}

Decay decay_from_name(std::string_view s) {
  if (s == "linear") return Decay::linear;
  if (s == "exponential") return Decay::exponential;
  throw DomainError("unknown decay law '" + std::string(s) + "'");
}

InitStrategy init_strategy_from_name(std::string_view s) {
  if (s == "pca_plane") return InitStrategy::pca_plane;
  if (s == "random_sample") return InitStrategy::random_sample;
  throw DomainError("unknown initialization '" + std::string(s) + "'");
}

void TrainingSchedule::validate() const {
  if (epochs == 0) throw DomainError("schedule needs at least one epoch");
  if (!(radius_start >= radius_end) || !(radius_end >= 0.0))
    throw DomainError("schedule radii must satisfy start >= end >= 0");
  if (decay == Decay::exponential && !(radius_end > 0.0))
    throw DomainError("exponential decay needs a positive end radius");
  if (mode == TrainingMode::online) {
    auto ok = [](double a) { return a > 0.0 && a <= 1.0; };
    if (!ok(learning_rate_start) || !ok(learning_rate_end))
      throw DomainError("learning rates must lie in (0, 1]");
  }
}

namespace {

double interpolate(double start, double end, double progress, Decay decay) {
  progress = std::clamp(progress, 0.0, 1.0);
  if (decay == Decay::exponential && start > 0.0 && end > 0.0)
    return start * std::pow(end / start, progress);
  return start + (end - start) * progress;
}

}  // namespace

double TrainingSchedule::radius_at(double progress) const {
  return interpolate(radius_start, radius_end, progress, decay);
}

double TrainingSchedule::learning_rate_at(double progress) const {
  return interpolate(learning_rate_start, learning_rate_end, progress, decay);
}

// ---------------------------------------------------------------------------

namespace {

void require_dim(const Matrix& data, std::size_t dim) {
  if (data.cols() != dim)
    throw DimensionError("data has " + std::to_string(data.cols()) + " columns, map expects " +
                         std::to_string(dim));
}

Matrix pca_plane(const GridTopology& topo, const Matrix& data) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto dim = static_cast<Eigen::Index>(data.cols());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      data.values().data(), n, dim);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

  // Leading directions, largest eigenvalue first, oriented so the largest
  // absolute component is positive.
  std::array<Eigen::VectorXd, 2> axis;
  std::array<double, 2> spread{0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    axis[k] = Eigen::VectorXd::Zero(dim);
    if (k >= dim) continue;
    const Eigen::Index col = dim - 1 - k;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    axis[k] = v;
    spread[k] = std::sqrt(std::max(0.0, eig.eigenvalues()(col)));
  }

  const bool rows_major = topo.rows >= topo.cols;
  auto coordinate = [](std::size_t i, std::size_t count) {
    return count > 1 ? 2.0 * static_cast<double>(i) / static_cast<double>(count - 1) - 1.0 : 0.0;
  };
  Matrix codebook(topo.units(), data.cols());
  for (std::size_t u = 0; u < topo.units(); ++u) {
    const double a = coordinate(topo.row_of(u), topo.rows);
    const double b = coordinate(topo.col_of(u), topo.cols);
    const double first = rows_major ? a : b;
    const double second = rows_major ? b : a;
    const Eigen::VectorXd p = mean.transpose() + first * spread[0] * axis[0] + second * spread[1] * axis[1];
    for (Eigen::Index k = 0; k < dim; ++k) codebook(u, static_cast<std::size_t>(k)) = p(k);
  }
  return codebook;
}

Matrix random_sample(const GridTopology& topo, const Matrix& data, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t units = topo.units();
  const std::size_t n = data.rows();
  std::vector<std::size_t> pick;
  if (units <= n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < units; ++i) {
      std::uniform_int_distribution<std::size_t> d(i, n - 1);
      std::swap(idx[i], idx[d(rng)]);
    }
    pick.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(units));
  } else {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    for (std::size_t i = 0; i < units; ++i) pick.push_back(d(rng));
  }
  Matrix codebook(units, data.cols());
  for (std::size_t u = 0; u < units; ++u) std::ranges::copy(data.row(pick[u]), codebook.row(u).begin());
  return codebook;
}

}  // namespace

SomMap init_map(const GridTopology& topology, std::size_t dim, const Matrix& data,
                InitStrategy strategy, std::uint64_t seed) {
  if (topology.units() == 0) throw DomainError("grid needs at least one unit");
  if (data.empty()) throw DomainError("cannot initialize a map from empty data");
  require_dim(data, dim);
  SomMap map;
  map.topology = topology;
  map.init = strategy;
  map.init_seed = seed;
  map.codebook = strategy == InitStrategy::pca_plane ? pca_plane(topology, data)
                                                      : random_sample(topology, data, seed);
  return map;
}

std::size_t bmu(const SomMap& map, std::span<const double> x) {
  if (x.size() != map.dim())
    throw DimensionError("vector has " + std::to_string(x.size()) + " entries, map expects " +
                         std::to_string(map.dim()));
  std::size_t best = 0;
  double best_d = squared_distance(map.codebook.row(0), x);
  for (std::size_t u = 1; u < map.units(); ++u) {
    const double d = squared_distance(map.codebook.row(u), x);
    if (d < best_d) {
      best_d = d;
      best = u;
    }
  }
  return best;
}

double neighborhood_weight(const GridTopology& topology, std::size_t u, std::size_t v, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("neighborhood width must be positive");
  const auto d = static_cast<double>(topology.grid_distance(u, v));
  const double w = std::exp(-(d * d) / (2.0 * sigma * sigma));
  return w < kNeighborhoodCutoff ? 0.0 : w;
}

Matrix kernel_matrix(const GridTopology& topology, double sigma) {
  const std::size_t units = topology.units();
  Matrix k(units, units);
  for (std::size_t u = 0; u < units; ++u)
    for (std::size_t v = 0; v < units; ++v)
      k(u, v) = sigma > 0.0 ? neighborhood_weight(topology, u, v, sigma) : (u == v ? 1.0 : 0.0);
  return k;
}

std::vector<std::size_t> batch_winners(const SomMap& map, const Matrix& data, double sigma) {
  require_dim(data, map.dim());
  std::vector<std::size_t> winners(data.rows());
  if (sigma > 0.0) {
    std::vector<double> local(data.rows());
    kernels::local_winner_parallel(map.codebook, data, training_kernel(map.topology, sigma), winners, local);
  } else {
    kernels::bmu_parallel(map.codebook, data, winners);
  }
  return winners;
}

Matrix training_kernel(const GridTopology& topology, double sigma) {
  Matrix k = kernel_matrix(topology, sigma);
  for (std::size_t c = 0; c < k.rows(); ++c) {
    auto row = k.row(c);
    double mass = 0.0;
    for (double h : row) mass += h;
    for (double& h : row) h /= mass;
  }
  return k;
}

void batch_epoch(SomMap& map, const Matrix& data, double sigma) {
  const auto winners = batch_winners(map, data, sigma);
  map.codebook = kernels::batch_update_parallel(map.codebook, data, winners,
                                                training_kernel(map.topology, sigma));
}

void online_update(SomMap& map, std::span<const double> x, double learning_rate, double sigma) {
  const std::size_t winner = bmu(map, x);
  for (std::size_t u = 0; u < map.units(); ++u) {
    const double h = sigma > 0.0 ? neighborhood_weight(map.topology, winner, u, sigma)
                                 : (u == winner ? 1.0 : 0.0);
    if (h == 0.0) continue;
    auto m = map.codebook.row(u);
    const double step = learning_rate * h;
    for (std::size_t k = 0; k < m.size(); ++k) m[k] += step * (x[k] - m[k]);
  }
}

SomMap train(SomMap map, const Matrix& data, const TrainingSchedule& schedule) {
  schedule.validate();
  if (data.empty()) throw DomainError("cannot train on empty data");
  require_dim(data, map.dim());
  map.schedule = schedule;
  map.trace.clear();

  const std::size_t n = data.rows();
  const std::size_t epochs = schedule.epochs;
  std::mt19937_64 rng(schedule.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t e = 0; e < epochs; ++e) {
    EpochStats stats;
    stats.epoch = e + 1;
    if (schedule.mode == TrainingMode::batch) {
      const double progress = epochs > 1 ? static_cast<double>(e) / static_cast<double>(epochs - 1) : 0.0;
      stats.radius = schedule.radius_at(progress);
      batch_epoch(map, data, stats.radius);
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      const double steps = static_cast<double>(epochs * n);
      for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(e * n + k);
        const double progress = steps > 1 ? t / (steps - 1) : 0.0;
        stats.radius = schedule.radius_at(progress);
        stats.learning_rate = schedule.learning_rate_at(progress);
        online_update(map, data.row(order[k]), stats.learning_rate, stats.radius);
      }
    }
    stats.quantization_error = quantization_error(map, data);
    stats.distortion = extended_distortion(map, data, stats.radius);
    map.trace.push_back(stats);
  }
  return map;
}

Assignment assign(const SomMap& map, const Matrix& data) {
  require_dim(data, map.dim());
  Assignment a;
  a.unit.resize(data.rows());
  kernels::bmu_parallel(map.codebook, data, a.unit);
  a.counts.assign(map.units(), 0);
  for (auto u : a.unit) ++a.counts[u];
  return a;
}

double quantization_error(const SomMap& map, const Matrix& data) {
  if (data.empty()) throw DomainError("quantization error of empty data");
  const auto a = assign(map, data);
  std::vector<double> d(data.rows());
  kernels::bmu_distances(map.codebook, data, a.unit, d);
  double sum = 0.0;
  for (double v : d) sum += std::sqrt(v);
  return sum / static_cast<double>(data.rows());
}

double topographic_error(const SomMap& map, const Matrix& data) {
  if (map.units() < 2) throw DomainError("topographic error needs at least two units");
  require_dim(data, map.dim());
  if (data.empty()) return 0.0;
  std::vector<kernels::BmuPair> pairs(data.rows());
  kernels::two_bmu_parallel(map.codebook, data, pairs);
  std::size_t errors = 0;
  for (const auto& p : pairs)
    if (!map.topology.adjacent(p.first, p.second)) ++errors;
  return static_cast<double>(errors) / static_cast<double>(data.rows());
}

double extended_distortion(const SomMap& map, const Matrix& data, double sigma) {
  require_dim(data, map.dim());
  if (data.empty()) return 0.0;
  std::vector<std::size_t> winners(data.rows());
  std::vector<double> local(data.rows());
  if (sigma > 0.0) {
    kernels::local_winner_parallel(map.codebook, data, training_kernel(map.topology, sigma), winners, local);
  } else {
    kernels::bmu_parallel(map.codebook, data, winners);
    kernels::bmu_distances(map.codebook, data, winners, local);
  }
  double total = 0.0;
  for (double v : local) total += v;
  return total / static_cast<double>(data.rows());
}

// ---------------------------------------------------------------------------

std::string serialize_map(const SomMap& map) {
  const auto& s = map.schedule;
  std::string out = "unemap-som 1\n";
  out += "rows " + std::to_string(map.topology.rows) + "\n";
  out += "cols " + std::to_string(map.topology.cols) + "\n";
  out += "dim " + std::to_string(map.dim()) + "\n";
  out += "init " + std::string(name_of(map.init)) + " " + std::to_string(map.init_seed) + "\n";
  out += "mode " + std::string(name_of(s.mode)) + "\n";
  out += "epochs " + std::to_string(s.epochs) + "\n";
  out += "radius " + text::format_double(s.radius_start) + " " + text::format_double(s.radius_end) + "\n";
  out += "learning_rate " + text::format_double(s.learning_rate_start) + " " +
         text::format_double(s.learning_rate_end) + "\n";
  out += "decay " + std::string(name_of(s.decay)) + "\n";
  out += "seed " + std::to_string(s.seed) + "\n";
  out += "codevectors\n";
  for (std::size_t u = 0; u < map.units(); ++u) {
    const auto row = map.codebook.row(u);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ' ';
      out += text::format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

SomMap parse_map(std::string_view contents) {
  std::istringstream in{std::string(contents)};
  std::string line;
  auto fail = [](const std::string& why) -> SomMap { throw SchemaError("map file: " + why); };
  if (!std::getline(in, line) || text::trim(line) != "unemap-som 1") return fail("unsupported header");

  SomMap map;
  std::size_t dim = 0;
  auto number = [&](std::string_view v) {
    const auto d = text::parse_double(v);
    if (!d) fail("bad number '" + std::string(v) + "'");
    return *d;
  };
  auto integer = [&](std::string_view v) {
    std::uint64_t out = 0;
    const auto t = text::trim(v);
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size())
      fail("bad integer '" + std::string(v) + "'");
    return out;
  };
  while (std::getline(in, line)) {
    const auto body = text::trim(line);
    if (body == "codevectors") break;
    const auto parts = text::split_fields(body, ' ');
    if (parts.size() < 2) return fail("bad header line '" + std::string(body) + "'");
    const auto& key = parts[0];
    if (key == "rows") map.topology.rows = integer(parts[1]);
    else if (key == "cols") map.topology.cols = integer(parts[1]);
    else if (key == "dim") dim = integer(parts[1]);
    else if (key == "init" && parts.size() == 3) {
      map.init = init_strategy_from_name(parts[1]);
      map.init_seed = integer(parts[2]);
    } else if (key == "mode") map.schedule.mode = training_mode_from_name(parts[1]);
    else if (key == "epochs") map.schedule.epochs = integer(parts[1]);
    else if (key == "radius" && parts.size() == 3) {
      map.schedule.radius_start = number(parts[1]);
      map.schedule.radius_end = number(parts[2]);
    } else if (key == "learning_rate" && parts.size() == 3) {
      map.schedule.learning_rate_start = number(parts[1]);
      map.schedule.learning_rate_end = number(parts[2]);
    } else if (key == "decay") map.schedule.decay = decay_from_name(parts[1]);
    else if (key == "seed") map.schedule.seed = integer(parts[1]);
    else return fail("unknown header key '" + key + "'");
  }
  const std::size_t units = map.topology.units();
  if (units == 0 || dim == 0) return fail("missing dimensions");
  map.codebook = Matrix(units, dim);
  for (std::size_t u = 0; u < units; ++u) {
    if (!std::getline(in, line)) return fail("truncated code vectors");
    const auto parts = text::split_fields(text::trim(line), ' ');
    if (parts.size() != dim) return fail("code vector " + std::to_string(u) + " has wrong length");
    for (std::size_t k = 0; k < dim; ++k) map.codebook(u, k) = number(parts[k]);
  }
  return map;
}

}  // namespace unemap
