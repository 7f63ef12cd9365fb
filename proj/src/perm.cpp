#include "covstat/perm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "covstat/combinatorics.hpp"
#include "covstat/errors.hpp"

namespace covstat {

Permutation identity_perm(int n) {
  Permutation p;
  p.images.resize(n);
  std::iota(p.images.begin(), p.images.end(), 0);
  return p;
}

Permutation inverse(const Permutation& p) {
  Permutation r;
  r.images.resize(p.images.size());
  for (int i = 0; i < p.degree(); ++i) r.images[p.images[i]] = i;
  return r;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree())
    throw DegreeMismatch("compose: degrees " + std::to_string(p.degree()) + " and " + std::to_string(q.degree()));
  Permutation r;
  r.images.resize(p.images.size());
  for (int i = 0; i < p.degree(); ++i) r.images[i] = q.images[p.images[i]];
  return r;
}

Permutation random_permutation(int n, Rng& rng) {
  Permutation p = identity_perm(n);
  for (int i = n - 1; i > 0; --i) std::swap(p.images[i], p.images[rng.below(i + 1)]);
  return p;
}

bool is_permutation(const std::vector<int>& images) {
  std::vector<char> hit(images.size(), 0);
  for (int x : images) {
    if (x < 0 || x >= static_cast<int>(images.size()) || hit[x]) return false;
    hit[x] = 1;
  }
  return true;
}

CycleType cycle_type(const Permutation& p) {
  const int n = p.degree();
  CycleType ct;
  ct.m.assign(n + 1, 0);
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = p.images[j]) seen[j] = 1, ++len;
    ++ct.m[len];
  }
  return ct;
}

int fix_count_power(const CycleType& ct, int k) {
  int fixed = 0;
  for (int c = 1; c < static_cast<int>(ct.m.size()); ++c)
    if (k % c == 0) fixed += c * ct.m[c];
  return fixed;
}

int fix_count_power(const Permutation& p, int k) { return fix_count_power(cycle_type(p), k); }

HomSample make_hom(int g, std::vector<Permutation> gens) {
  if (static_cast<int>(gens.size()) != 2 * g) throw InvariantViolation("need 2g generator images");
  HomSample s;
  s.g = g;
  s.n = gens.empty() ? 0 : gens[0].degree();
  for (auto& p : gens)
    if (p.degree() != s.n) throw DegreeMismatch("generator images of different degree");
  s.gens = std::move(gens);
  for (auto& p : s.gens) s.inv.push_back(inverse(p));
  return s;
}

namespace {

// x_i <- image of x_i under the letter, applied left to right
inline void apply_letter(const HomSample& s, Letter x, std::vector<int>& pts) {
  const auto& img = x.inverted() ? s.inv[x.index()].images : s.gens[x.index()].images;
  for (auto& v : pts) v = img[v];
}

}  // namespace

Permutation evaluate_hom(const HomSample& s, const Word& w) {
  Permutation r = identity_perm(s.n);
  for (Letter x : w.letters) apply_letter(s, x, r.images);
  return r;
}

bool relation_holds(const HomSample& s) {
  std::vector<int> pts(s.n);
  std::iota(pts.begin(), pts.end(), 0);
  for (int i = 0; i < s.g; ++i) {
    apply_letter(s, Letter::make(2 * i, false), pts);
    apply_letter(s, Letter::make(2 * i + 1, false), pts);
    apply_letter(s, Letter::make(2 * i, true), pts);
    apply_letter(s, Letter::make(2 * i + 1, true), pts);
  }
  for (int i = 0; i < s.n; ++i)
    if (pts[i] != i) return false;
  return true;
}

SampledHom sample_uniform_hom(int n, int g, Rng& rng, std::uint64_t max_attempts) {
  if (n < 1 || g < 2) throw InvariantViolation("sample_uniform_hom needs n >= 1 and g >= 2");
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    std::vector<Permutation> gens;
    gens.reserve(2 * g);
    for (int i = 0; i < 2 * g; ++i) gens.push_back(random_permutation(n, rng));
    HomSample s = make_hom(g, std::move(gens));
    if (relation_holds(s)) return {std::move(s), attempt};
  }
  throw AttemptsExhausted("no relation-satisfying tuple after " + std::to_string(max_attempts) +
                          " attempts (n=" + std::to_string(n) + ")");
}

std::uint64_t enumerate_homs(int n, int g, const std::function<void(const HomSample&)>& visit) {
  if (n > kMaxEnumerationDegree)
    throw DegreeTooLarge("enumeration is capped at n=" + std::to_string(kMaxEnumerationDegree));
  std::vector<Permutation> all;
  Permutation p = identity_perm(n);
  do all.push_back(p);
  while (std::next_permutation(p.images.begin(), p.images.end()));

  const int slots = 2 * g;
  double tuples = std::pow(static_cast<double>(all.size()), slots);
  if (tuples > static_cast<double>(kMaxEnumerationTuples))
    throw DegreeTooLarge("enumeration would visit " + std::to_string(tuples) + " tuples");

  std::vector<std::size_t> idx(slots, 0);
  std::uint64_t count = 0;
  for (;;) {
    std::vector<Permutation> gens;
    for (auto i : idx) gens.push_back(all[i]);
    HomSample s = make_hom(g, std::move(gens));
    if (relation_holds(s)) {
      ++count;
      visit(s);
    }
    int k = slots - 1;
    while (k >= 0 && ++idx[k] == all.size()) idx[k--] = 0;
    if (k < 0) break;
  }
  return count;
}

BigInt hook_length_dimension(const std::vector<int>& lambda) {
  int n = 0;
  for (int r : lambda) n += r;
  BigInt num = 1, den = 1;
  for (int i = 2; i <= n; ++i) num *= i;
  // column lengths of the transpose
  std::vector<int> col(lambda.empty() ? 0 : lambda[0], 0);
  for (int r : lambda)
    for (int j = 0; j < r; ++j) ++col[j];
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (int j = 0; j < lambda[i]; ++j) den *= (lambda[i] - j - 1) + (col[j] - static_cast<int>(i) - 1) + 1;
  return num / den;
}

BigInt hom_count_formula(int n, int g) {
  // (n!)^{2g-1} sum dim^{2-2g} = n! * sum (n!/dim)^{2g-2}; n!/dim is an integer
  BigInt fact = 1;
  for (int i = 2; i <= n; ++i) fact *= i;
  BigInt total = 0;
  for (const auto& lambda : integer_partitions(n)) {
    BigInt ratio = fact / hook_length_dimension(lambda);
    total += boost::multiprecision::pow(ratio, 2 * g - 2);
  }
  return total * fact;
}

int F_statistic(const HomSample& s, const Word& word, int power) {
  return fix_count_power(evaluate_hom(s, word), power);
}

void save_hom_batch(const std::string& path, const std::vector<HomSample>& batch, std::uint64_t seed) {
  nlohmann::json j;
  j["n"] = batch.empty() ? 0 : batch[0].n;
  j["g"] = batch.empty() ? 0 : batch[0].g;
  j["seed"] = seed;
  j["count"] = batch.size();
  auto& arr = j["samples"] = nlohmann::json::array();
  for (const auto& s : batch) {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& p : s.gens) gens.push_back(p.images);
    arr.push_back(gens);
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump() << "\n";
}

std::vector<HomSample> load_hom_batch(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  const int n = j.at("n"), g = j.at("g");
  std::vector<HomSample> out;
  for (const auto& gens : j.at("samples")) {
    std::vector<Permutation> ps;
    for (const auto& img : gens) {
      Permutation p{img.get<std::vector<int>>()};
      if (p.degree() != n || !is_permutation(p.images)) throw InvariantViolation(path + ": bad permutation");
      ps.push_back(std::move(p));
    }
    HomSample s = make_hom(g, std::move(ps));
    if (!relation_holds(s)) throw InvariantViolation(path + ": sample violates the surface relation");
    out.push_back(std::move(s));
  }
  if (out.size() != j.at("count").get<std::size_t>()) throw InvariantViolation(path + ": count mismatch");
  return out;
}

}  // namespace covstat
