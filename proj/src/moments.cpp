#include "covstat/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "covstat/combinatorics.hpp"
#include "covstat/errors.hpp"

namespace covstat {

std::string to_string(const BigRational& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

double to_double(const BigRational& q) { return q.convert_to<double>(); }

PartitionOfK::PartitionOfK(std::vector<int> p) : parts(std::move(p)) {
  if (parts.empty()) throw InvariantViolation("a partition needs at least one part");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 1) throw InvariantViolation("partition parts must be positive");
    if (i > 0 && parts[i] > parts[i - 1]) throw InvariantViolation("partition parts must be descending");
  }
}

int PartitionOfK::k() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::vector<PartitionOfK> partitions(int k) {
  if (k < 1) throw InvariantViolation("partitions need k >= 1");
  std::vector<PartitionOfK> out;
  for (auto& p : integer_partitions(k)) out.emplace_back(std::move(p));
  return out;
}

namespace {

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

BigInt sym_count(const PartitionOfK& r) {
  BigInt out = 1;
  for (std::size_t i = 0; i < r.parts.size();) {
    std::size_t j = i;
    while (j < r.parts.size() && r.parts[j] == r.parts[i]) ++j;
    out *= factorial(static_cast<int>(j - i));
    i = j;
  }
  return out;
}

BigInt multinomial(int k, const PartitionOfK& r) {
  if (r.k() != k) throw InvariantViolation("partition does not sum to k");
  BigInt out = factorial(k);
  for (int p : r.parts) out /= factorial(p);
  return out;
}

std::int64_t G(std::int64_t a, std::int64_t b) {
  if (a < 1 || b < 1) throw InvariantViolation("G needs positive arguments");
  return divisor_sigma(std::gcd(a, b));
}

namespace {

// Stirling numbers of the second kind S(m, j), j = 0..m
std::vector<BigInt> stirling2_row(int m) {
  std::vector<BigInt> row{1};
  for (int i = 1; i <= m; ++i) {
    std::vector<BigInt> next(i + 1, 0);
    for (int j = 1; j <= i; ++j) next[j] = (j < i ? j * row[j] : BigInt(0)) + row[j - 1];
    row = std::move(next);
  }
  return row;
}

BigRational pow_q(const BigRational& x, int e) {
  BigRational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

BigRational cached_poisson(int m, const BigRational& lambda, bool central, MomentTable* table) {
  if (!central) return poisson_raw_moment(m, lambda);
  BigRational v;
  if (table && table->lookup_poisson(m, lambda, v)) return v;
  v = poisson_central_moment(m, lambda);
  if (table) table->store_poisson(m, lambda, v);
  return v;
}

// In the limit model F(g^a) = sum_{d | a} d Z_d with independent Z_d ~
// Poisson(1/d), and U(g^a) = sum_{d | a} d (Z_d - 1/d). Expanding the product
// over divisor tuples, each term is prod d_i times a product over distinct d of
// a moment of Z_d whose order is the number of times d was picked.
BigRational divisor_expansion(const std::vector<int>& powers, bool centered, MomentTable* table) {
  std::vector<std::vector<std::int64_t>> divs;
  for (int a : powers) divs.push_back(divisors(a));
  std::map<std::int64_t, int> counts;
  BigRational total = 0;
  const std::size_t r = powers.size();

  auto close = [&](BigInt weight) {
    BigRational term = weight;
    for (auto [d, c] : counts) {
      BigRational m = cached_poisson(c, BigRational(1, d), centered, table);
      if (m == 0) return;
      term *= m;
    }
    total += term;
  };
  auto rec = [&](auto&& self, std::size_t i, BigInt weight) -> void {
    if (i == r) {
      close(weight);
      return;
    }
    for (auto d : divs[i]) {
      ++counts[d];
      self(self, i + 1, weight * d);
      if (--counts[d] == 0) counts.erase(d);
    }
  };
  rec(rec, 0, BigInt(1));
  return total;
}

}  // namespace

BigRational poisson_raw_moment(int m, const BigRational& lambda) {
  if (m < 0) throw InvariantViolation("moment order must be >= 0");
  auto S = stirling2_row(m);
  BigRational out = 0;
  for (int j = 0; j <= m; ++j) out += BigRational(S[j]) * pow_q(lambda, j);
  return out;
}

BigRational poisson_central_moment(int m, const BigRational& lambda) {
  if (m < 0) throw InvariantViolation("moment order must be >= 0");
  BigRational out = 0;
  for (int i = 0; i <= m; ++i)
    out += BigRational(binomial(m, i)) * poisson_raw_moment(i, lambda) * pow_q(-lambda, m - i);
  return out;
}

LimitMomentKey::LimitMomentKey(std::vector<int> p) : powers(std::move(p)) {
  for (int a : powers)
    if (a < 1) throw InvariantViolation("limit moment powers must be >= 1");
}

LimitMomentKey LimitMomentKey::sorted() const {
  auto p = powers;
  std::sort(p.begin(), p.end());
  return LimitMomentKey(std::move(p));
}

BigRational R_exact(const LimitMomentKey& key, MomentTable* table) {
  auto k = key.sorted().powers;
  BigRational v;
  if (table && table->lookup_R(k, v)) return v;
  v = divisor_expansion(k, true, table);
  if (table) table->store_R(k, v);
  return v;
}

BigRational raw_single_moment(const LimitMomentKey& key, MomentTable* table) {
  auto k = key.sorted().powers;
  BigRational v;
  if (table && table->lookup_raw(k, v)) return v;
  v = divisor_expansion(k, false, table);
  if (table) table->store_raw(k, v);
  return v;
}

BigRational limit_cross_moment(const std::vector<LimitMomentKey>& classes, bool centered, MomentTable* table) {
  BigRational out = 1;
  for (const auto& c : classes) out *= centered ? R_exact(c, table) : raw_single_moment(c, table);
  return out;
}

double H_eval(const std::vector<HFactor>& factors, const WindowParams& p, const TestFunctionSpec& spec) {
  double out = 1;
  for (const auto& f : factors) {
    if (!(f.length > 0)) throw InvariantViolation("geodesic lengths must be positive");
    const double x = f.power * f.length;
    if (x >= p.L * spec.support_radius) return 0;
    out *= f.chi_re * f.length * psi_hat_eval(spec, x / p.L) * std::cos(p.alpha * x) / std::sinh(x / 2);
  }
  return out;
}

std::size_t GeodesicTerms::num_terms() const {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.s.size();
  return n;
}

GeodesicTerms geodesic_terms(const LengthSpectrum& spectrum, double L, const Character& chi,
                             const TestFunctionSpec& spec) {
  const double reach = L * spec.support_radius;
  if (spectrum.cutoff < reach)
    throw SpectrumTooShort("spectrum cutoff " + std::to_string(spectrum.cutoff) + " is below the window reach " +
                           std::to_string(reach));
  const bool trivial = std::all_of(chi.values.begin(), chi.values.end(), [](auto z) { return z == 1.0; });
  if (!spectrum.has_words && !trivial)
    throw WordsAbsent("a nontrivial character needs a spectrum with words");

  GeodesicTerms out;
  out.L = L;
  for (const auto& g : spectrum.classes) {
    if (g.length >= reach) break;
    ClassTerms c;
    c.length = g.length;
    c.word = g.key.cyclic_word;
    const std::complex<double> z = trivial ? 1.0 : char_eval(chi, g.key.cyclic_word);
    std::complex<double> zk = 1;
    for (int a = 1; a * g.length < reach; ++a) {
      zk *= z;
      const double x = a * g.length;
      c.s.push_back(zk.real() * g.length * psi_hat_eval(spec, x / L) / std::sinh(x / 2));
    }
    out.classes.push_back(std::move(c));
  }
  return out;
}

bool MomentTable::lookup_R(const std::vector<int>& key, BigRational& out) const {
  std::lock_guard lock(mu_);
  auto it = R_.find(key);
  if (it == R_.end()) return false;
  out = it->second;
  return true;
}

void MomentTable::store_R(const std::vector<int>& key, const BigRational& v) {
  std::lock_guard lock(mu_);
  R_.emplace(key, v);
}

bool MomentTable::lookup_raw(const std::vector<int>& key, BigRational& out) const {
  std::lock_guard lock(mu_);
  auto it = raw_.find(key);
  if (it == raw_.end()) return false;
  out = it->second;
  return true;
}

void MomentTable::store_raw(const std::vector<int>& key, const BigRational& v) {
  std::lock_guard lock(mu_);
  raw_.emplace(key, v);
}

bool MomentTable::lookup_poisson(int m, const BigRational& lambda, BigRational& out) const {
  std::lock_guard lock(mu_);
  auto it = poisson_.find({m, lambda});
  if (it == poisson_.end()) return false;
  out = it->second;
  return true;
}

void MomentTable::store_poisson(int m, const BigRational& lambda, const BigRational& v) {
  std::lock_guard lock(mu_);
  poisson_.emplace(std::make_pair(m, lambda), v);
}

bool MomentTable::lookup_B(const BKey& key, double& out) const {
  std::lock_guard lock(mu_);
  auto it = B_.find(key);
  if (it == B_.end()) return false;
  out = it->second;
  return true;
}

void MomentTable::store_B(const BKey& key, double v) {
  std::lock_guard lock(mu_);
  B_.emplace(key, v);
}

namespace {

// c[a-1] = s(g, a) cos(alpha a l), the full per-class coefficient of H
std::vector<double> class_coefficients(const ClassTerms& c, double alpha) {
  std::vector<double> out(c.s.size());
  for (std::size_t i = 0; i < c.s.size(); ++i) out[i] = c.s[i] * std::cos(alpha * (i + 1) * c.length);
  return out;
}

// R values as doubles for all sorted r-tuples of powers <= A
class RTable {
 public:
  RTable(MomentTable* table) : table_(table) {}

  double get(std::vector<int> key) {
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double v = to_double(R_exact(LimitMomentKey(key), table_));
    cache_.emplace(std::move(key), v);
    return v;
  }

 private:
  MomentTable* table_;
  std::map<std::vector<int>, double> cache_;
};

// Q_r(g) = sum over power tuples (a_1..a_r) of prod c[a_i] * R(a_1..a_r), i.e.
// lim E[X_g^r] for X_g = sum_a c[a] U(g^a). Enumerates nondecreasing tuples
// and weights each by its number of orderings.
double single_class_moment(int r, const std::vector<double>& c, RTable& R) {
  if (r == 0) return 1;
  const int A = static_cast<int>(c.size());
  std::vector<int> tuple(r, 1);
  double total = 0;
  auto rec = [&](auto&& self, int pos, int lo) -> void {
    if (pos == r) {
      double prod = 1, orderings = 1;
      int run = 1;
      for (int i = 0; i < r; ++i) {
        prod *= c[tuple[i] - 1];
        if (i > 0 && tuple[i] == tuple[i - 1]) orderings /= ++run;
        else run = 1;
        orderings *= i + 1;
      }
      if (prod != 0) total += orderings * prod * R.get(tuple);
      return;
    }
    for (int a = lo; a <= A; ++a) {
      tuple[pos] = a;
      self(self, pos + 1, a);
    }
  };
  rec(rec, 0, 1);
  return total;
}

// Set partitions of {0..t-1} as block lists
void set_partitions(int t, std::vector<std::vector<int>>& cur, std::vector<std::vector<std::vector<int>>>& out,
                    int i = 0) {
  if (i == t) {
    out.push_back(cur);
    return;
  }
  for (std::size_t b = 0; b < cur.size(); ++b) {  // by index: the recursion may grow cur
    cur[b].push_back(i);
    set_partitions(t, cur, out, i + 1);
    cur[b].pop_back();
  }
  cur.push_back({i});
  set_partitions(t, cur, out, i + 1);
  cur.pop_back();
}

std::string context_tag(const GeodesicTerms& terms, const WindowParams& p) {
  // B depends on the terms and alpha; a digest of both keys the memo
  std::ostringstream os;
  os.precision(17);
  os << p.alpha << '|' << terms.L << '|' << terms.classes.size();
  double h = 0;
  for (const auto& c : terms.classes) {
    h = h * 1.000000119 + c.length;
    for (double s : c.s) h = h * 0.999999881 + s;
  }
  os << '|' << h;
  return os.str();
}

}  // namespace

double B_eval(const PartitionOfK& r, const GeodesicTerms& terms, const WindowParams& p, MomentTable* table) {
  if (r.k() > kMaxMomentOrder) throw InvariantViolation("moment order above the cap of 6");
  if (r.has_part_one()) return 0.0;
  MomentTable::BKey bkey{r.parts, context_tag(terms, p)};
  double cached;
  if (table && table->lookup_B(bkey, cached)) return cached;

  RTable R(table);
  const int t = static_cast<int>(r.parts.size());
  // Q[i][j] = Q_{r_i}(class j)
  std::vector<std::vector<double>> Q(t, std::vector<double>(terms.classes.size()));
  for (std::size_t j = 0; j < terms.classes.size(); ++j) {
    auto c = class_coefficients(terms.classes[j], p.alpha);
    for (int i = 0; i < t; ++i) Q[i][j] = (i > 0 && r.parts[i] == r.parts[i - 1]) ? Q[i - 1][j]
                                                                               : single_class_moment(r.parts[i], c, R);
  }

  // sum over distinct (g_1..g_t) of prod Q_i(g_i) by Moebius inversion on the
  // lattice of set partitions: sum_pi mu(pi) prod_blocks sum_g prod_{i in B} Q_i(g)
  // with mu(pi) = prod (-1)^{|B|-1} (|B|-1)!
  std::vector<std::vector<int>> cur;
  std::vector<std::vector<std::vector<int>>> all;
  set_partitions(t, cur, all);
  double total = 0;
  for (const auto& pi : all) {
    double term = 1;
    for (const auto& block : pi) {
      double s = 0;
      for (std::size_t j = 0; j < terms.classes.size(); ++j) {
        double prod = 1;
        for (int i : block) prod *= Q[i][j];
        s += prod;
      }
      const int b = static_cast<int>(block.size());
      double mu = (b % 2 == 1 ? 1.0 : -1.0);
      for (int m = 2; m < b; ++m) mu *= m;
      term *= mu * s;
    }
    total += term;
  }
  if (table) table->store_B(bkey, total);
  return total;
}

double B_eval(const PartitionOfK& r, const LengthSpectrum& s, const WindowParams& p, const Character& chi,
              const TestFunctionSpec& spec, MomentTable* table) {
  return B_eval(r, geodesic_terms(s, p.L, chi, spec), p, table);
}

double B_eval_bruteforce(const PartitionOfK& r, const GeodesicTerms& terms, const WindowParams& p) {
  if (terms.classes.size() > kMaxBruteForceClasses)
    throw InvariantViolation("brute-force B is limited to " + std::to_string(kMaxBruteForceClasses) + " classes");
  const int k = r.k();
  const int t = static_cast<int>(r.parts.size());
  const int nc = static_cast<int>(terms.classes.size());
  std::vector<std::vector<double>> coeff;
  for (const auto& c : terms.classes) coeff.push_back(class_coefficients(c, p.alpha));

  // position -> block index
  std::vector<int> owner;
  for (int i = 0; i < t; ++i) owner.insert(owner.end(), r.parts[i], i);

  std::vector<int> cls(t), pw(k);
  double total = 0;
  auto over_powers = [&](auto&& self, int pos, double h) -> void {
    if (pos == k) {
      BigRational e = 1;
      for (int i = 0; i < t && e != 0; ++i) {
        std::vector<int> key;
        for (int q = 0; q < k; ++q)
          if (owner[q] == i) key.push_back(pw[q]);
        e *= R_exact(LimitMomentKey(key));
      }
      total += h * to_double(e);
      return;
    }
    const auto& c = coeff[cls[owner[pos]]];
    for (int a = 1; a <= static_cast<int>(c.size()); ++a) {
      pw[pos] = a;
      self(self, pos + 1, h * c[a - 1]);
    }
  };
  auto over_classes = [&](auto&& self, int i) -> void {
    if (i == t) {
      over_powers(over_powers, 0, 1.0);
      return;
    }
    for (int j = 0; j < nc; ++j) {
      if (std::find(cls.begin(), cls.begin() + i, j) != cls.begin() + i) continue;
      cls[i] = j;
      self(self, i + 1);
    }
  };
  over_classes(over_classes, 0);
  return total;
}

double central_moment_limit(int k, const GeodesicTerms& terms, const WindowParams& p, MomentTable* table) {
  if (k < 1 || k > kMaxMomentOrder) throw InvariantViolation("moment order must be in 1..6");
  double total = 0;
  for (const auto& r : partitions(k)) {
    double B = B_eval(r, terms, p, table);
    if (B == 0) continue;
    total += to_double(BigRational(multinomial(k, r), sym_count(r))) * B;
  }
  return std::pow(2 / terms.L, k) * total;
}

double central_moment_limit(int k, const LengthSpectrum& s, const WindowParams& p, const Character& chi,
                            const TestFunctionSpec& spec, MomentTable* table) {
  return central_moment_limit(k, geodesic_terms(s, p.L, chi, spec), p, table);
}

double gaussian_moment(int k, double sigma2) {
  if (k < 2) throw InvariantViolation("gaussian_moment needs k >= 2");
  if (k % 2) return 0;
  double df = 1;
  for (int i = k - 1; i > 1; i -= 2) df *= i;
  return df * std::pow(sigma2, k / 2);
}

}  // namespace covstat
