#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "covstat/group.hpp"
#include "covstat/rng.hpp"

namespace covstat {

struct Permutation {
  std::vector<int> images;

  int degree() const { return static_cast<int>(images.size()); }
  int operator()(int i) const { return images[i]; }
  friend bool operator==(const Permutation&, const Permutation&) = default;
};

Permutation identity_perm(int n);
Permutation inverse(const Permutation& p);
// Left-to-right: (p*q)(i) = q(p(i)).
Permutation compose(const Permutation& p, const Permutation& q);
Permutation random_permutation(int n, Rng& rng);
bool is_permutation(const std::vector<int>& images);

// m[c] = number of cycles of length c (index 0 unused)
struct CycleType {
  std::vector<int> m;
};
CycleType cycle_type(const Permutation& p);

// #Fix(p^k) = sum over c | k of c * m_c
int fix_count_power(const Permutation& p, int k);
int fix_count_power(const CycleType& ct, int k);

struct HomSample {
  int n = 0;
  int g = 0;
  std::vector<Permutation> gens;  // images of a1, b1, a2, b2, ...
  std::vector<Permutation> inv;   // their inverses, filled by make_hom

  friend bool operator==(const HomSample& a, const HomSample& b) {
    return a.n == b.n && a.g == b.g && a.gens == b.gens;
  }
};

HomSample make_hom(int g, std::vector<Permutation> gens);
bool relation_holds(const HomSample& s);
Permutation evaluate_hom(const HomSample& s, const Word& w);

struct SampledHom {
  HomSample hom;
  std::uint64_t attempts = 0;
};
SampledHom sample_uniform_hom(int n, int g, Rng& rng, std::uint64_t max_attempts);

// Exhaustive enumeration is an oracle for tiny cases only.
inline constexpr int kMaxEnumerationDegree = 4;
inline constexpr std::uint64_t kMaxEnumerationTuples = 331776;  // 24^4
std::uint64_t enumerate_homs(int n, int g, const std::function<void(const HomSample&)>& visit);

using BigInt = boost::multiprecision::cpp_int;
BigInt hook_length_dimension(const std::vector<int>& partition);
BigInt hom_count_formula(int n, int g);

int F_statistic(const HomSample& s, const Word& word, int power);

// JSON cover cache: {"n","g","seed","count","samples":[[[...],...],...]}
void save_hom_batch(const std::string& path, const std::vector<HomSample>& batch, std::uint64_t seed);
std::vector<HomSample> load_hom_batch(const std::string& path);

}  // namespace covstat
