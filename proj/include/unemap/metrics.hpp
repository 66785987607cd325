#pragma once

#include <span>

namespace unemap {

// Adjusted Rand index between two labelings of the same records. Labels are
// arbitrary integers. Returns 1 when both partitions are trivial and equal.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace unemap
