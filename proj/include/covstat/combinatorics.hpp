#pragma once

#include <cstdint>
#include <vector>

namespace covstat {

// Partitions of k, parts in descending order, partitions in reverse
// lexicographic order: (k), (k-1,1), ..., (1,...,1).
std::vector<std::vector<int>> integer_partitions(int k);

std::vector<std::int64_t> divisors(std::int64_t n);
std::int64_t divisor_sigma(std::int64_t n);
std::int64_t num_divisors(std::int64_t n);

}  // namespace covstat
