#pragma once

#include <cstdint>
#include <random>

namespace covstat {

// mt19937_64 seeded from (seed, stream) through seed_seq. Each worker / draw
// gets its own stream, so results never depend on scheduling. The uniform
// helpers are written out here instead of using std distributions because
// those are not specified bit-for-bit across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    eng_.seed(seq);
  }

  std::uint64_t next() { return eng_(); }

  // uniform on [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on {0, ..., n-1}, unbiased by rejection
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = next();
    while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace covstat
