#include "covstat/combinatorics.hpp"

#include <functional>

namespace covstat {

std::vector<std::vector<int>> integer_partitions(int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int maxpart) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(left, maxpart); p >= 1; --p) {
      cur.push_back(p);
      rec(left - p, p);
      cur.pop_back();
    }
  };
  if (k >= 1) rec(k, k);
  return out;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d * d != n) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

std::int64_t divisor_sigma(std::int64_t n) {
  std::int64_t s = 0;
  for (auto d : divisors(n)) s += d;
  return s;
}

std::int64_t num_divisors(std::int64_t n) { return static_cast<std::int64_t>(divisors(n).size()); }

}  // namespace covstat
