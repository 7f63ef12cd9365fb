#include "covstat/mc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "covstat/combinatorics.hpp"
#include "covstat/errors.hpp"

namespace covstat {

namespace {
constexpr double pi = std::numbers::pi;
}

int poisson_inversion(double lambda, Rng& rng) {
  double u = rng.uniform01();
  double p = std::exp(-lambda), cdf = p;
  int k = 0;
  while (u >= cdf && p > 0) {
    ++k;
    p *= lambda / k;
    cdf += p;
  }
  return k;
}

PoissonDraw sample_limit_model(const GeodesicTerms& terms, Rng& rng) {
  PoissonDraw draw;
  draw.Z.resize(terms.classes.size());
  for (std::size_t j = 0; j < terms.classes.size(); ++j) {
    const std::size_t A = terms.classes[j].s.size();
    draw.Z[j].resize(A);
    for (std::size_t d = 1; d <= A; ++d) draw.Z[j][d - 1] = poisson_inversion(1.0 / d, rng);
  }
  return draw;
}

int F_limit(const PoissonDraw& draw, std::size_t cls, int k) {
  int F = 0;
  for (int d = 1; d <= k; ++d)
    if (k % d == 0) F += d * draw.Z[cls][d - 1];
  return F;
}

double geodesic_sum(const GeodesicTerms& terms, const WindowParams& p) {
  CompensatedSum sum;
  for (const auto& c : terms.classes)
    for (std::size_t a = 1; a <= c.s.size(); ++a) sum.add(c.s[a - 1] * std::cos(p.alpha * a * c.length));
  return 2 / terms.L * sum.value();
}

double n_osc_limit(const PoissonDraw& draw, const GeodesicTerms& terms, const WindowParams& p) {
  CompensatedSum sum;
  for (std::size_t j = 0; j < terms.classes.size(); ++j) {
    const auto& c = terms.classes[j];
    for (std::size_t a = 1; a <= c.s.size(); ++a)
      sum.add(c.s[a - 1] * std::cos(p.alpha * a * c.length) * F_limit(draw, j, static_cast<int>(a)));
  }
  return 2 / terms.L * sum.value();
}

double t_centered_limit(const PoissonDraw& draw, const GeodesicTerms& terms, const WindowParams& p) {
  return statistic_at(centered_limit_terms(draw, terms), terms.L, p.alpha);
}

std::vector<int> finite_counts(const HomSample& s, const GeodesicTerms& terms) {
  std::vector<int> out;
  out.reserve(terms.num_terms());
  for (const auto& c : terms.classes) {
    if (c.word.empty()) throw WordsAbsent("finite-n statistics need a spectrum with words");
    CycleType ct = cycle_type(evaluate_hom(s, c.word));
    for (std::size_t a = 1; a <= c.s.size(); ++a) out.push_back(fix_count_power(ct, static_cast<int>(a)));
  }
  return out;
}

double n_osc_finite(const HomSample& s, const GeodesicTerms& terms, const WindowParams& p) {
  auto F = finite_counts(s, terms);
  CompensatedSum sum;
  std::size_t i = 0;
  for (const auto& c : terms.classes)
    for (std::size_t a = 1; a <= c.s.size(); ++a, ++i) sum.add(c.s[a - 1] * std::cos(p.alpha * a * c.length) * F[i]);
  return 2 / terms.L * sum.value();
}

CenteredTerms centered_limit_terms(const PoissonDraw& draw, const GeodesicTerms& terms) {
  CenteredTerms out;
  for (std::size_t j = 0; j < terms.classes.size(); ++j) {
    const auto& c = terms.classes[j];
    for (std::size_t a = 1; a <= c.s.size(); ++a) {
      const int k = static_cast<int>(a);
      out.x.push_back(k * c.length);
      out.f.push_back(c.s[a - 1] * (F_limit(draw, j, k) - static_cast<double>(num_divisors(k))));
      out.cls.push_back(static_cast<int>(j));
    }
  }
  return out;
}

CenteredTerms centered_terms(const std::vector<double>& U, const GeodesicTerms& terms) {
  if (U.size() != terms.num_terms()) throw InvariantViolation("centered counts do not match the terms");
  CenteredTerms out;
  std::size_t i = 0;
  for (std::size_t j = 0; j < terms.classes.size(); ++j) {
    const auto& c = terms.classes[j];
    for (std::size_t a = 1; a <= c.s.size(); ++a, ++i) {
      out.x.push_back(a * c.length);
      out.f.push_back(c.s[a - 1] * U[i]);
      out.cls.push_back(static_cast<int>(j));
    }
  }
  return out;
}

double statistic_at(const CenteredTerms& c, double L, double alpha) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < c.x.size(); ++i) sum.add(c.f[i] * std::cos(alpha * c.x[i]));
  return 2 / L * sum.value();
}

void RunningMoments::push(double x) {
  RunningMoments one;
  one.n_ = 1;
  one.mean_ = x;
  merge(one);
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double nA = static_cast<double>(n_), nB = static_cast<double>(o.n_), n = nA + nB;
  const double delta = o.mean_ - mean_;
  static const double binom[7][7] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1},
                                     {1, 5, 10, 10, 5, 1}, {1, 6, 15, 20, 15, 6, 1}};
  double M[kMaxOrder + 1] = {};
  for (int p = 2; p <= kMaxOrder; ++p) {
    double v = M_[p] + o.M_[p];
    for (int k = 1; k <= p - 2; ++k)
      v += binom[p][k] * std::pow(delta, k) *
           (std::pow(-nB / n, k) * M_[p - k] + std::pow(nA / n, k) * o.M_[p - k]);
    v += std::pow(nA * nB * delta / n, p) * (1 / std::pow(nB, p - 1) - std::pow(-1 / nA, p - 1));
    M[p] = v;
  }
  std::copy(std::begin(M), std::end(M), M_);
  mean_ += nB * delta / n;
  n_ += o.n_;
}

double RunningMoments::central(int p) const {
  if (p < 0 || p > kMaxOrder) throw InvariantViolation("moment order out of range");
  if (p == 0) return 1;
  if (p == 1 || n_ == 0) return 0;
  return M_[p] / static_cast<double>(n_);
}

double RunningMoments::raw(int p) const {
  static const double binom[7][7] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}, {1, 4, 6, 4, 1},
                                     {1, 5, 10, 10, 5, 1}, {1, 6, 15, 20, 15, 6, 1}};
  double v = 0;
  for (int j = 0; j <= p; ++j) v += binom[p][j] * central(j) * std::pow(mean_, p - j);
  return v;
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) c_ += (sum_ - t) + x;
  else c_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

// indices of c sorted by frequency
std::vector<std::size_t> by_frequency(const CenteredTerms& c) {
  std::vector<std::size_t> idx(c.x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return c.x[i] < c.x[j]; });
  return idx;
}

}  // namespace

DiagOff diag_off(const CenteredTerms& c, double T, const WeightSpec& W) {
  // w_hat(T (x_i - x_j)) vanishes unless |x_i - x_j| < 1/T: scan neighbours in frequency order
  auto idx = by_frequency(c);
  CompensatedSum diag, off;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const std::size_t i = idx[a];
    for (std::size_t b = a; b < idx.size(); ++b) {
      const std::size_t j = idx[b];
      const double arg = T * (c.x[j] - c.x[i]);
      if (arg >= 1) break;
      const double v = (a == b ? 1 : 2) * c.f[i] * c.f[j] * w_hat_eval(W, arg);
      (c.cls[i] == c.cls[j] ? diag : off).add(v);
    }
  }
  return {diag.value(), off.value()};
}

double energy_variance_spectral(const CenteredTerms& c, double L, double T, const WeightSpec& W) {
  auto d = diag_off(c, T, W);
  CompensatedSum second, mean;
  second.add(d.diag);
  second.add(d.off);
  // w_hat(T (x_i + x_j)) and w_hat(T x_i) only matter when T x < 1 for some term
  const double xmin = c.x.empty() ? 0 : *std::min_element(c.x.begin(), c.x.end());
  if (!c.x.empty() && 2 * T * xmin < 1) {
    for (std::size_t i = 0; i < c.x.size(); ++i)
      for (std::size_t j = 0; j < c.x.size(); ++j) second.add(c.f[i] * c.f[j] * w_hat_eval(W, T * (c.x[i] + c.x[j])));
  }
  if (!c.x.empty() && T * xmin < 1)
    for (std::size_t i = 0; i < c.x.size(); ++i) mean.add(c.f[i] * w_hat_eval(W, T * c.x[i]));
  const double m = 4 * pi / L * mean.value();
  return 4 * pi / (L * L) * second.value() - m * m;
}

double energy_variance_quadrature(const CenteredTerms& c, double L, double T, const WeightSpec& W,
                                  const QuadratureConfig& q) {
  // Terms with the same frequency (length multiplicities are large) are merged
  // first; the statistic is then sum F_k cos(alpha x_k), evaluated on the
  // uniform alpha grid by phasor rotation, resynchronised every block.
  auto idx = by_frequency(c);
  std::vector<double> xs, fs;
  for (auto i : idx) {
    if (!xs.empty() && c.x[i] - xs.back() <= 1e-11 * std::max(1.0, xs.back())) fs.back() += c.f[i];
    else xs.push_back(c.x[i]), fs.push_back(c.f[i]);
  }
  const double xmax = xs.empty() ? 0 : xs.back();
  AlphaRule rule = alpha_rule(W, T, 2 * xmax, q);
  const std::size_t M = rule.u.size();
  const double step = M > 1 ? rule.u[1] : 1;
  std::vector<double> t(M, 0.0);
  constexpr std::size_t kBlock = 512;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double theta = T * step * xs[k];
    const std::complex<double> rot = std::polar(1.0, theta);
    for (std::size_t m0 = 0; m0 < M; m0 += kBlock) {
      std::complex<double> z = std::polar(1.0, theta * static_cast<double>(m0));
      const std::size_t m1 = std::min(M, m0 + kBlock);
      for (std::size_t m = m0; m < m1; ++m) {
        t[m] += fs[k] * z.real();
        z *= rot;
      }
    }
  }
  CompensatedSum e1, e2;
  double outer1 = 0, outer2 = 0;
  long outer_n = 0;
  const double U = rule.u.back();
  for (std::size_t m = 0; m < M; ++m) {
    const double v = 2 / L * t[m];
    e1.add(rule.weight[m] * v);
    e2.add(rule.weight[m] * v * v);
    if (rule.u[m] > 0.9 * U) outer1 += v, outer2 += v * v, ++outer_n;
  }
  if (rule.tail_mass > 0 && outer_n) {
    e1.add(rule.tail_mass * outer1 / outer_n);
    e2.add(rule.tail_mass * outer2 / outer_n);
  }
  return e2.value() - e1.value() * e1.value();
}

}  // namespace covstat
