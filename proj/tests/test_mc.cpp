#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "covstat/combinatorics.hpp"
#include "covstat/errors.hpp"
#include "covstat/experiment.hpp"
#include "covstat/mc.hpp"

using namespace covstat;

namespace {

const LengthSpectrum& bolza10() {
  static const LengthSpectrum s = enumerate_spectrum(builtin_model("bolza"), 10);
  return s;
}

GeodesicTerms terms_at(double L, const Character& chi = Character::trivial(2)) {
  return geodesic_terms(bolza10(), L, chi, TestFunctionSpec::bump());
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_SUITE("mc") {

TEST_CASE("Poisson sampling by inversion") {
  Rng rng(1, 0);
  for (double lambda : {1.0, 0.5, 0.2}) {
    RunningMoments m;
    for (int i = 0; i < 100000; ++i) m.push(poisson_inversion(lambda, rng));
    const double se = std::sqrt(lambda / 1e5);
    CHECK(std::abs(m.mean() - lambda) < 4 * se);
    CHECK(std::abs(m.central(2) - lambda) < 0.03 * lambda);
  }
}

TEST_CASE("limit-model fixed-point counts") {
  auto terms = terms_at(10);
  // the systole class carries three powers below L = 10
  REQUIRE(terms.classes[0].s.size() == 3);
  PoissonDraw zero;
  zero.Z.resize(terms.classes.size());
  for (std::size_t j = 0; j < terms.classes.size(); ++j) zero.Z[j].assign(terms.classes[j].s.size(), 0);
  for (int k = 1; k <= 3; ++k) CHECK(F_limit(zero, 0, k) == 0);

  // all Z = 0: the centered statistic is minus the sum weighted by d(k)
  WindowParams p{50, 10, 1};
  double expected = 0;
  for (const auto& c : terms.classes)
    for (std::size_t a = 1; a <= c.s.size(); ++a)
      expected -= c.s[a - 1] * std::cos(p.alpha * a * c.length) * num_divisors(static_cast<std::int64_t>(a));
  expected *= 2 / terms.L;
  CHECK(t_centered_limit(zero, terms, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(n_osc_limit(zero, terms, p) == 0);
}

TEST_CASE("limit-model counts have divisor means and divisor-sum variances") {
  // a synthetic class long enough to carry four powers
  GeodesicTerms terms;
  terms.L = 10;
  terms.classes.push_back(ClassTerms{2.0, {1, 1, 1, 1}, {}});
  RunningMoments f4, f2;
  const int N = 100000;
  for (int i = 0; i < N; ++i) {
    Rng rng(2, i);
    auto draw = sample_limit_model(terms, rng);
    f4.push(F_limit(draw, 0, 4));
    f2.push(F_limit(draw, 0, 2));
  }
  CHECK(std::abs(f4.mean() - 3) < 3 * std::sqrt(f4.central(2) / N));
  const double var_se = std::sqrt((f2.central(4) - f2.central(2) * f2.central(2)) / N);
  CHECK(std::abs(f2.central(2) - 3) < 3 * var_se);
}

TEST_CASE("finite-n oscillating term") {
  auto chi = Character::trivial(2);
  WindowParams p{50, 10, 1};
  auto terms = terms_at(10);
  auto trivial = make_hom(2, std::vector<Permutation>(4, identity_perm(6)));
  CHECK(n_osc_finite(trivial, terms, p) == doctest::Approx(6 * geodesic_sum(terms, p)).epsilon(1e-12));

  auto empty = geodesic_terms(bolza10(), 2.0, chi, TestFunctionSpec::bump());
  CHECK(empty.classes.empty());
  CHECK(n_osc_finite(trivial, empty, WindowParams{50, 2, 1}) == 0);

  // a character equal to -1 on every generator flips the sign of odd word lengths
  LengthSpectrum one = bolza10();
  one.classes.resize(1);
  auto plus = geodesic_terms(one, 10, chi, TestFunctionSpec::bump());
  auto minus = geodesic_terms(one, 10, Character(std::vector<std::complex<double>>(4, -1.0)), TestFunctionSpec::bump());
  const int wl = one.classes[0].word_length;
  for (std::size_t a = 1; a <= plus.classes[0].s.size(); ++a)
    CHECK(minus.classes[0].s[a - 1] == (((a * wl) % 2) ? -1 : 1) * plus.classes[0].s[a - 1]);

  LengthSpectrum synthetic = bolza10();
  synthetic.has_words = false;
  for (auto& c : synthetic.classes) c.key = ConjClassKey{};
  auto bare = geodesic_terms(synthetic, 8, chi, TestFunctionSpec::bump());
  CHECK_THROWS_AS(finite_counts(trivial, bare), WordsAbsent);
}

TEST_CASE("folded statistic equals the per-term statistic") {
  auto terms = terms_at(10);
  WindowParams p{50, 10, 1};
  LimitStatistic stat(terms, p);
  for (int i = 0; i < 200; ++i) {
    Rng a(3, i), b(3, i);
    CHECK(stat.sample(a) == doctest::Approx(t_centered_limit(sample_limit_model(terms, b), terms, p)).epsilon(1e-11).scale(1));
  }
}

TEST_CASE("running moments merge like the union") {
  Rng rng(4, 0);
  std::vector<double> xs;
  for (int i = 0; i < 3000; ++i) xs.push_back(std::exp(rng.uniform01() * 2) - 3);
  RunningMoments whole, a, b, c;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    whole.push(xs[i]);
    (i < 700 ? a : i < 2100 ? b : c).push(xs[i]);
  }
  RunningMoments left = a, right = b;
  left.merge(b);
  left.merge(c);
  right.merge(c);
  RunningMoments assoc = a;
  assoc.merge(right);
  CHECK(left.count() == whole.count());
  CHECK(assoc.count() == whole.count());
  for (int p = 2; p <= 6; ++p) {
    CHECK(left.central(p) == doctest::Approx(whole.central(p)).epsilon(1e-9));
    CHECK(assoc.central(p) == doctest::Approx(left.central(p)).epsilon(1e-9));
  }
  // against a direct two-pass computation
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  for (int p = 2; p <= 6; ++p) {
    double m = 0, r = 0;
    for (double x : xs) m += std::pow(x - mean, p), r += std::pow(x, p);
    CHECK(whole.central(p) == doctest::Approx(m / xs.size()).epsilon(1e-9));
    CHECK(whole.raw(p) == doctest::Approx(r / xs.size()).epsilon(1e-9));
  }
  RunningMoments empty;
  empty.merge(whole);
  CHECK(empty.central(4) == whole.central(4));
}

TEST_CASE("compensated summation") {
  CompensatedSum s;
  s.add(1e16);
  s.add(1);
  s.add(-1e16);
  CHECK(s.value() == 1);
}

TEST_CASE("limit-model statistic: centering and variance") {
  for (double L : {6.0, 8.0, 10.0}) {
    auto terms = terms_at(L);
    WindowParams p{50, L, 1};
    LimitStatistic stat(terms, p);
    RunningMoments m;
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
      Rng rng(5, i);
      m.push(stat.sample(rng));
    }
    const double exact = central_moment_limit(2, terms, p);
    const double var_se = std::sqrt((m.central(4) - m.central(2) * m.central(2)) / N);
    CAPTURE(L);
    CHECK(std::abs(m.mean()) < 3 * std::sqrt(m.central(2) / N));
    CHECK(std::abs(m.raw(2) - exact) < 3 * var_se);
  }
}

TEST_CASE("diagonal and off-diagonal parts") {
  auto terms = terms_at(10);
  Rng rng(6, 0);
  auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
  // At huge T only equal frequencies survive: the squares on the
  // diagonal, and pairs of distinct classes of equal length off it (the
  // Bolza spectrum is highly degenerate, so those do not vanish).
  double sq = 0, equal = 0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    sq += c.f[i] * c.f[i];
    for (std::size_t j = 0; j < c.x.size(); ++j)
      if (c.cls[i] != c.cls[j] && std::abs(c.x[i] - c.x[j]) < 1e-9) equal += c.f[i] * c.f[j];
  }
  CHECK(equal != 0);
  for (auto W : {WeightSpec::fejer(), WeightSpec::smooth()}) {
    auto d = diag_off(c, 1e6, W);
    CHECK(d.diag == doctest::Approx(sq * w_hat_eval(W, 0)).epsilon(1e-12));
    CHECK(d.off == doctest::Approx(equal * w_hat_eval(W, 0)).epsilon(1e-9).scale(sq));
  }
  CenteredTerms single;
  for (std::size_t i = 0; i < c.x.size(); ++i)
    if (c.cls[i] == 0) single.x.push_back(c.x[i]), single.f.push_back(c.f[i]), single.cls.push_back(0);
  CHECK(diag_off(single, 2, WeightSpec::fejer()).off == 0);
}

TEST_CASE("energy variance: quadrature and spectral routes agree") {
  const double L = 8, T = 64;
  auto terms = terms_at(L);
  for (auto W : {WeightSpec::fejer(), WeightSpec::smooth()}) {
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      Rng rng(7, i);
      auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
      const double a = energy_variance_quadrature(c, L, T, W), b = energy_variance_spectral(c, L, T, W);
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
    }
    CAPTURE(W.name());
    CHECK(worst <= 1e-6);
  }
  // small T, where the w_hat(T(x + y)) and mean terms matter
  Rng rng(7, 99);
  auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
  const double a = energy_variance_quadrature(c, L, 0.2, WeightSpec::smooth());
  CHECK(a == doctest::Approx(energy_variance_spectral(c, L, 0.2, WeightSpec::smooth())).epsilon(1e-6));
}

TEST_CASE("energy variance of a statistic constant in the window height") {
  auto terms = geodesic_terms(bolza10(), 8, Character::trivial(2), TestFunctionSpec::bump(1.0, 0.0));
  Rng rng(8, 0);
  auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
  CHECK(energy_variance_spectral(c, 8, 64, WeightSpec::fejer()) == 0);
  CHECK(energy_variance_quadrature(c, 8, 64, WeightSpec::fejer()) == 0);
}

TEST_CASE("energy variance concentrates as L and T grow") {
  const double sigma2 = sigma_goe(TestFunctionSpec::bump());
  std::vector<double> med;
  for (auto [L, T] : {std::pair{6.0, 48.0}, std::pair{10.0, 80.0}}) {
    auto terms = terms_at(L);
    std::vector<double> dev;
    for (int i = 0; i < 200; ++i) {
      Rng rng(9, i);
      auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
      dev.push_back(std::abs(energy_variance_spectral(c, L, T, WeightSpec::fejer()) - sigma2));
    }
    med.push_back(median(dev));
  }
  CHECK(med[1] < med[0]);
}

TEST_CASE("expected diagonal approaches the GOE variance") {
  const double sigma2 = sigma_goe(TestFunctionSpec::bump());
  std::vector<double> gap;
  for (double L : {6.0, 10.0}) {
    auto terms = terms_at(L);
    RunningMoments d;
    for (int i = 0; i < 10000; ++i) {
      Rng rng(10, i);
      auto c = centered_limit_terms(sample_limit_model(terms, rng), terms);
      // at huge T only the squares survive, weighted by w_hat(0) = 1/(2 pi)
      d.push(4 * std::numbers::pi / (L * L) * diag_off(c, 1e9, WeightSpec::fejer()).diag);
    }
    gap.push_back(std::abs(d.mean() / sigma2 - 1));
  }
  CHECK(gap[1] <= 0.25);
  CHECK(gap[1] < gap[0]);
}

}  // TEST_SUITE
