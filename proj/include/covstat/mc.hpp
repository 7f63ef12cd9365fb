#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covstat/kernels.hpp"
#include "covstat/moments.hpp"
#include "covstat/perm.hpp"
#include "covstat/rng.hpp"

namespace covstat {

// Poisson(lambda) by sequential inversion; fine for lambda <= 1.
int poisson_inversion(double lambda, Rng& rng);

// Z[j][d-1] ~ Poisson(1/d) for class j of the terms and 1 <= d <= its number of powers
struct PoissonDraw {
  std::vector<std::vector<int>> Z;
};
PoissonDraw sample_limit_model(const GeodesicTerms& terms, Rng& rng);

// F(g^k) = sum_{d | k} d Z_d
int F_limit(const PoissonDraw& draw, std::size_t cls, int k);

// (2/L) sum over classes and powers of s(g, k) cos(alpha k l): the oscillating
// term with every fixed-point count replaced by 1
double geodesic_sum(const GeodesicTerms& terms, const WindowParams& p);

double n_osc_limit(const PoissonDraw& draw, const GeodesicTerms& terms, const WindowParams& p);
// centered by the exact limit means E[F(g^k)] = d(k)
double t_centered_limit(const PoissonDraw& draw, const GeodesicTerms& terms, const WindowParams& p);

// Fixed-point counts F(g^k) of a cover, flattened in terms order (class, then k).
std::vector<int> finite_counts(const HomSample& s, const GeodesicTerms& terms);
double n_osc_finite(const HomSample& s, const GeodesicTerms& terms, const WindowParams& p);

// The statistic as a function of the flattened centered counts U = F - mean
struct CenteredTerms {
  std::vector<double> x;  // k * l
  std::vector<double> f;  // s(g, k) U(g^k)
  std::vector<int> cls;   // class index
};
CenteredTerms centered_limit_terms(const PoissonDraw& draw, const GeodesicTerms& terms);
CenteredTerms centered_terms(const std::vector<double>& U, const GeodesicTerms& terms);
double statistic_at(const CenteredTerms& c, double L, double alpha);

// Streaming count, mean and central sums M_p = sum (x - mean)^p for p <= 6,
// merged with the pairwise update formulas of Pebay.
class RunningMoments {
 public:
  static constexpr int kMaxOrder = 6;

  void push(double x);
  void merge(const RunningMoments& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  // M_p / n
  double central(int p) const;
  // E[x^p] from the mean and central sums (moment about zero)
  double raw(int p) const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0;
  double M_[kMaxOrder + 1] = {};
};

// Neumaier compensated sum
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0, c_ = 0;
};

struct DiagOff {
  double diag = 0;
  double off = 0;
};
// Full w_hat-weighted double sum split by equal / distinct classes:
// sum f_i f_j w_hat(T (x_i - x_j)).
DiagOff diag_off(const CenteredTerms& c, double T, const WeightSpec& W);

// V_T of the centered statistic over alpha.
//   route A: quadrature E_T[t^2] - E_T[t]^2 on the trapezoid alpha grid
//   route B: (4 pi / L^2) sum f_i f_j (w_hat(T(x_i - x_j)) + w_hat(T(x_i + x_j)))
//            - ((4 pi / L) sum f_i w_hat(T x_i))^2
double energy_variance_quadrature(const CenteredTerms& c, double L, double T, const WeightSpec& W,
                                  const QuadratureConfig& q = {});
double energy_variance_spectral(const CenteredTerms& c, double L, double T, const WeightSpec& W);

}  // namespace covstat
