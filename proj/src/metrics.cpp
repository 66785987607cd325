#include "unemap/metrics.hpp"

#include <map>
#include <utility>

#include "unemap/errors.hpp"

namespace unemap {

namespace {
double pairs(double n) { return n * (n - 1.0) / 2.0; }
}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DimensionError("labelings differ in length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [_, c] : joint) index += pairs(c);
  for (const auto& [_, c] : ra) sum_a += pairs(c);
  for (const auto& [_, c] : rb) sum_b += pairs(c);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total > 0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace unemap
