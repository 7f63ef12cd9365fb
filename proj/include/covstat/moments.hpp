#pragma once

#include <map>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "covstat/group.hpp"
#include "covstat/kernels.hpp"
#include "covstat/spectrum.hpp"

namespace covstat {

using BigRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

std::string to_string(const BigRational& q);
double to_double(const BigRational& q);

struct PartitionOfK {
  std::vector<int> parts;  // descending, positive

  explicit PartitionOfK(std::vector<int> parts);
  int k() const;
  bool has_part_one() const { return !parts.empty() && parts.back() == 1; }
  friend bool operator==(const PartitionOfK&, const PartitionOfK&) = default;
  friend auto operator<=>(const PartitionOfK&, const PartitionOfK&) = default;
};

std::vector<PartitionOfK> partitions(int k);
// number of reorderings of equal parts: prod over distinct values of (multiplicity)!
BigInt sym_count(const PartitionOfK& r);
BigInt multinomial(int k, const PartitionOfK& r);

// sigma(gcd(a, b)), the limiting covariance of F(gamma^a) and F(gamma^b)
std::int64_t G(std::int64_t a, std::int64_t b);

BigRational poisson_raw_moment(int m, const BigRational& lambda);
BigRational poisson_central_moment(int m, const BigRational& lambda);

// Powers (a_1, ..., a_r) of one primitive class
struct LimitMomentKey {
  std::vector<int> powers;

  explicit LimitMomentKey(std::vector<int> powers);
  LimitMomentKey sorted() const;
};

class MomentTable;

// lim E[U(g^a_1) ... U(g^a_r)] in the Poisson limit model
BigRational R_exact(const LimitMomentKey& key, MomentTable* table = nullptr);
// lim E[F(g^a_1) ... F(g^a_r)]
BigRational raw_single_moment(const LimitMomentKey& key, MomentTable* table = nullptr);

// Product over distinct classes of the single-class moments.
BigRational limit_cross_moment(const std::vector<LimitMomentKey>& classes, bool centered,
                               MomentTable* table = nullptr);

// One factor of H: Re chi(g^a) l psi_hat(a l / L) cos(alpha a l) / sinh(a l / 2)
struct HFactor {
  double length = 0;
  int power = 1;
  double chi_re = 1;  // Re chi(gamma^power)
};
double H_eval(const std::vector<HFactor>& factors, const WindowParams& p, const TestFunctionSpec& spec);

// Per-class coefficients of the oscillating term, truncated to a l < L rho.
// s[a-1] = Re chi(g^a) l psi_hat(a l / L) / sinh(a l / 2); the cos(alpha a l)
// factor is kept separate because the energy variance averages over alpha.
struct ClassTerms {
  double length = 0;
  std::vector<double> s;
  Word word;  // empty when the spectrum carries no words
};
struct GeodesicTerms {
  double L = 0;
  std::vector<ClassTerms> classes;  // spectrum order, classes with no surviving power dropped

  std::size_t num_terms() const;
};
GeodesicTerms geodesic_terms(const LengthSpectrum& spectrum, double L, const Character& chi,
                             const TestFunctionSpec& spec);

// Memo for the exact rationals and for B values. Thread-safe; values are the
// same with or without it.
class MomentTable {
 public:
  bool lookup_R(const std::vector<int>& key, BigRational& out) const;
  void store_R(const std::vector<int>& key, const BigRational& v);
  bool lookup_raw(const std::vector<int>& key, BigRational& out) const;
  void store_raw(const std::vector<int>& key, const BigRational& v);
  bool lookup_poisson(int m, const BigRational& lambda, BigRational& out) const;
  void store_poisson(int m, const BigRational& lambda, const BigRational& v);

  using BKey = std::tuple<std::vector<int>, std::string>;
  bool lookup_B(const BKey& key, double& out) const;
  void store_B(const BKey& key, double v);

 private:
  mutable std::mutex mu_;
  std::map<std::vector<int>, BigRational> R_, raw_;
  std::map<std::pair<int, BigRational>, BigRational> poisson_;
  std::map<BKey, double> B_;
};

inline constexpr int kMaxMomentOrder = 6;
inline constexpr std::size_t kMaxBruteForceClasses = 6;

// Sum over ordered tuples of distinct classes (one per part) and powers of
// H * lim E[U...]. Factorized by classes with inclusion-exclusion over
// coincidences; exactly 0 when a part equals 1.
double B_eval(const PartitionOfK& r, const GeodesicTerms& terms, const WindowParams& p,
              MomentTable* table = nullptr);
double B_eval(const PartitionOfK& r, const LengthSpectrum& s, const WindowParams& p, const Character& chi,
              const TestFunctionSpec& spec, MomentTable* table = nullptr);
// Direct tuple summation, an oracle for at most kMaxBruteForceClasses classes.
double B_eval_bruteforce(const PartitionOfK& r, const GeodesicTerms& terms, const WindowParams& p);

// (2/L)^k sum over partitions of k of multinomial / #Sym * B
double central_moment_limit(int k, const GeodesicTerms& terms, const WindowParams& p, MomentTable* table = nullptr);
double central_moment_limit(int k, const LengthSpectrum& s, const WindowParams& p, const Character& chi,
                            const TestFunctionSpec& spec, MomentTable* table = nullptr);

// (k-1)!! sigma^k for even k, 0 for odd k
double gaussian_moment(int k, double sigma2);

}  // namespace covstat
