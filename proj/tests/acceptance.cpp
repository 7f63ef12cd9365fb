// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "covstat/combinatorics.hpp"
#include "covstat/experiment.hpp"
#include "covstat/moments.hpp"
#include "covstat/perm.hpp"
#include "covstat/spectrum.hpp"

using namespace covstat;
using nlohmann::json;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s %2d  %s  [%s]\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// least-squares slope of log|y| against log x
double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(std::abs(y[i])) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(std::abs(y[i])) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

const LengthSpectrum& bolza10() {
  static const LengthSpectrum s = enumerate_spectrum(builtin_model("bolza"), 10);
  return s;
}

const Character kTrivial = Character::trivial(2);
const Character kGue = Character::from_angles({1, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0)});

void criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  int bad = 0;
  for (int a = 1; a <= 24; ++a)
    for (int b = 1; b <= 24; ++b)
      if (R_exact(LimitMomentKey({a, b})) != BigRational(divisor_sigma(std::gcd(a, b)))) ++bad;
  const double s = seconds_since(t0);
  report(1, bad == 0 && s < 10, "R(a,b) = sigma(gcd(a,b)) exactly for 1 <= a,b <= 24",
         fmt("%d mismatches, %.2f s", bad, s));
}

void criterion2() {
  auto inner = limit_cross_moment({LimitMomentKey({2, 3})}, false);
  auto full = limit_cross_moment({LimitMomentKey({2, 3}), LimitMomentKey({4})}, false);
  report(2, inner == 5 && full == 15, "E[F(g^2)F(g^3)F(d^4)] = 15 and E[F(g^2)F(g^3)] = 5",
         fmt("got %s and %s", to_string(full).c_str(), to_string(inner).c_str()));
}

void criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (int n : {2, 3, 4}) {
    const std::uint64_t count = enumerate_homs(n, 2, [](const HomSample&) {});
    const auto formula = hom_count_formula(n, 2);
    ok = ok && BigInt(count) == formula;
    detail += fmt("n=%d: %llu vs %s; ", n, static_cast<unsigned long long>(count), formula.str().c_str());
  }
  const double s = seconds_since(t0);
  report(3, ok && s < 60, "enumerated cover counts equal the character-sum formula", detail + fmt("%.2f s", s));
}

void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  auto key = [](const HomSample& h) {
    std::vector<int> k;
    for (const auto& p : h.gens) k.insert(k.end(), p.images.begin(), p.images.end());
    return k;
  };
  std::map<std::vector<int>, int> cell;
  const Word a1 = parse_word("a1", 2);
  long exact_sum = 0;
  enumerate_homs(3, 2, [&](const HomSample& h) {
    cell.emplace(key(h), static_cast<int>(cell.size()));
    exact_sum += F_statistic(h, a1, 1);
  });
  const double exact = static_cast<double>(exact_sum) / cell.size();

  const std::uint64_t N = 100000;
  std::vector<std::uint64_t> hits(cell.size(), 0);
  RunningMoments F;
  bool unknown = false;
  for (std::uint64_t i = 0; i < N; ++i) {
    Rng rng(2024, i);
    auto h = sample_uniform_hom(3, 2, rng, 1000000).hom;
    auto it = cell.find(key(h));
    if (it == cell.end()) {
      unknown = true;
      continue;
    }
    ++hits[it->second];
    F.push(F_statistic(h, a1, 1));
  }
  const double expect = static_cast<double>(N) / cell.size();
  double chi2 = 0;
  for (auto c : hits) chi2 += (c - expect) * (c - expect) / expect;
  const double pvalue = boost::math::cdf(boost::math::complement(boost::math::chi_squared(cell.size() - 1.0), chi2));
  const double se = std::sqrt(F.central(2) / N);
  const bool ok = !unknown && cell.size() == 486 && pvalue > 1e-3 && std::abs(F.mean() - exact) <= 3 * se;
  report(4, ok, "rejection sampler is uniform on the 486 degree-3 covers",
         fmt("chi2=%.1f on %zu dof, p=%.3g; E[F(a1)]=%.5f vs exact %.5f (SE %.5f); %.1f s", chi2, cell.size() - 1,
             pvalue, F.mean(), exact, se, seconds_since(t0)));
}

void criterion5() {
  auto spec = TestFunctionSpec::bump();
  double hat_err = 0;
  for (auto [alpha, L] : {std::pair{50.0, 10.0}, std::pair{2.0, 6.0}}) {
    WindowParams p{alpha, L, 1};
    std::vector<double> z;
    for (int i = 0; i < 100; ++i) z.push_back(-1.2 * L + 2.4 * L * i / 99.0);
    auto q = h_hat_by_quadrature(spec, p, z);
    for (std::size_t i = 0; i < z.size(); ++i) hat_err = std::max(hat_err, std::abs(q[i] - h_hat_eval(spec, p, z[i])));
  }
  double cos_err = 0;
  for (auto W : {WeightSpec::fejer(), WeightSpec::smooth()})
    for (double T : {8.0, 48.0, 80.0})
      for (double x : {0.1, 0.5, 1.0, 3.0, 7.5}) {
        const double e = expect_over_alpha([x](double a) { return std::cos(a * x); }, T, W, x);
        cos_err = std::max(cos_err, std::abs(e - 2 * std::numbers::pi * w_hat_eval(W, T * x)));
      }
  const double goe = sigma_for_character(spec, kTrivial), gue = sigma_for_character(spec, kGue);
  report(5, hat_err <= 1e-6 && cos_err <= 1e-6 && gue == goe / 2,
         "h_hat closed form, cosine averages over the window height, GUE = GOE/2",
         fmt("h_hat err %.2e; cosine err %.2e; GOE %.15g, GUE %.15g", hat_err, cos_err, goe, gue));
}

void criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  auto spec = TestFunctionSpec::bump();
  const double sigma2 = sigma_goe(spec);
  std::vector<double> gap;
  std::string detail;
  for (double L : {6.0, 8.0, 10.0}) {
    const double v = central_moment_limit(2, bolza10(), WindowParams{50, L, 1}, kTrivial, spec);
    gap.push_back(std::abs(v / sigma2 - 1));
    detail += fmt("L=%g |ratio-1|=%.4f; ", L, gap.back());
  }
  const bool ok = gap[1] < gap[0] && gap[2] < gap[1] && gap[2] <= 0.25;
  report(6, ok, "exact variance approaches the GOE value as L grows", detail + fmt("%.1f s", seconds_since(t0)));
}

void criterion7() {
  auto t0 = std::chrono::steady_clock::now();
  json j{{"experiment", "clt"}, {"L", {10}}, {"samples", 100000}, {"max_k", 4}, {"seed", 7}, {"jobs", jobs()}};
  auto r = run_experiment(parse_config(j), bolza10());
  const auto& row = r.body["summary"][0];
  const double skew = row["standardized_skew"], kurt = row["standardized_kurtosis"];
  std::string detail;
  for (std::size_t i = 0; i < r.body["estimates"].size(); ++i) {
    const auto& e = r.body["estimates"][i];
    detail += fmt("k=%d %.4g+-%.2g vs %.4g; ", e["k"].get<int>(), e["value"].get<double>(), e["se"].get<double>(),
                  r.body["references"][i]["central_moment_limit"].get<double>());
  }
  const bool ok = r.all_flags_pass() && std::abs(skew) <= 0.3 && kurt >= 2.4 && kurt <= 3.6;
  report(7, ok, "limit-model moments at L = 10 match the exact values and look Gaussian",
         detail + fmt("skew %.4f, kurtosis %.4f; %.1f s", skew, kurt, seconds_since(t0)));
}

void criterion8() {
  auto spec = TestFunctionSpec::bump();
  const std::vector<double> Ls{5, 8, 10};
  std::vector<double> V;
  std::string detail;
  for (double L : Ls) {
    V.push_back(central_moment_limit(3, bolza10(), WindowParams{50, L, 1}, kTrivial, spec));
    detail += fmt("V3(%g)=%.4g; ", L, V.back());
  }
  bool zero = true;
  for (double L : Ls)
    for (auto parts : std::vector<std::vector<int>>{{2, 1}, {1, 1, 1}})
      zero = zero && B_eval(PartitionOfK(parts), bolza10(), WindowParams{50, L, 1}, kTrivial, spec) == 0.0;
  const double slope = fitted_exponent(Ls, V);
  const double local = std::log(std::abs(V[2] / V[1])) / std::log(Ls[2] / Ls[1]);
  report(8, zero && slope <= -2, "third central moment decays at least like L^-2",
         detail + fmt("fitted exponent %.3f, local exponent 8->10 %.3f; (2,1) and (1,1,1) terms %s", slope, local,
                      zero ? "exactly 0" : "NONZERO"));
}

void criterion9() {
  auto spec = TestFunctionSpec::bump();
  bool zero = true;
  int checked = 0;
  for (int k = 2; k <= 6; ++k)
    for (const auto& r : partitions(k)) {
      if (!r.has_part_one()) continue;
      for (double L : {6.0, 10.0}) {
        zero = zero && B_eval(r, bolza10(), WindowParams{50, L, 1}, kTrivial, spec) == 0.0;
        ++checked;
      }
    }
  // the five shortest classes, well inside the brute-force limit
  LengthSpectrum small = bolza10();
  small.classes.resize(5);
  double worst = 0;
  for (double alpha : {50.0, 3.3}) {
    WindowParams p{alpha, 10, 1};
    auto terms = geodesic_terms(small, 10, kTrivial, spec);
    const double f = B_eval(PartitionOfK({2, 2}), terms, p), b = B_eval_bruteforce(PartitionOfK({2, 2}), terms, p);
    worst = std::max(worst, std::abs(f - b) / std::max(std::abs(b), 1e-300));
  }
  report(9, zero && worst <= 1e-9, "partitions with a part 1 vanish; factorized B(2,2) equals the tuple sum",
         fmt("%d part-1 evaluations, all zero: %s; max relative gap %.2e", checked, zero ? "yes" : "no", worst));
}

void criterion10() {
  auto t0 = std::chrono::steady_clock::now();
  auto variance = [](const std::string& chi) {
    json j{{"experiment", "clt"}, {"L", {10}}, {"samples", 100000}, {"max_k", 2}, {"seed", 11}, {"jobs", jobs()}, {"chi", chi}};
    return run_experiment(parse_config(j), bolza10()).body["estimates"][0]["value"].get<double>();
  };
  const double goe = variance("trivial");
  const double gue = variance(fmt("%.17g,%.17g,%.17g,%.17g", 1.0, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0)));
  const double ratio = gue / goe;
  report(10, ratio >= 0.4 && ratio <= 0.6, "a complex character halves the variance",
         fmt("Var GUE %.5f / Var trivial %.5f = %.4f; %.1f s", gue, goe, ratio, seconds_since(t0)));
}

void criterion11() {
  auto t0 = std::chrono::steady_clock::now();
  json j{{"experiment", "energy-variance"}, {"L", {6, 8, 10}}, {"T", {48, 64, 80}}, {"samples", 400},
         {"dual_route_draws", 20}, {"seed", 5}, {"jobs", jobs()}};
  auto r = run_experiment(parse_config(j), bolza10());
  std::string detail;
  double gap = 0;
  for (const auto& row : r.body["grid"]) {
    detail += fmt("(L=%g,T=%g) median %.4f; ", row["L"].get<double>(), row["T"].get<double>(),
                  row["median_abs_deviation"].get<double>());
    gap = std::max(gap, row["dual_route_max_rel_gap"].get<double>());
  }
  report(11, r.all_flags_pass(), "energy variance: both routes agree and the median deviation shrinks",
         detail + fmt("dual-route gap %.2e; %.1f s", gap, seconds_since(t0)));
}

void criterion12() {
  auto t0 = std::chrono::steady_clock::now();
  const auto m = builtin_model("bolza");
  auto rel = word_to_matrix<long double>(m, m.group.relator());
  const bool relation = is_plus_minus_identity(rel, 1e-9);
  const auto& s = bolza10();
  EnumerationOptions wider;
  wider.horizon = s.horizon_word_length + 2;
  const std::string diff = compare_spectra(s, enumerate_spectrum(m, 10, wider), 10);
  const double sys_err = std::abs(s.systole() - 2 * std::acosh(1 + std::sqrt(2.0)));
  std::string counts;
  bool finite = true;
  for (double T : {6.0, 8.0, 10.0}) {
    const double r = counting_N0(s, T) * T / std::exp(T);
    finite = finite && std::isfinite(r);
    counts += fmt("N0*T/e^T(%g)=%.4f; ", T, r);
  }
  report(12, relation && diff.empty() && sys_err <= 1e-6 && finite,
         "surface relation, horizon stability, systole, prime geodesic counts",
         fmt("horizon %d vs %d: %s; systole err %.2e; ", s.horizon_word_length, wider.horizon,
             diff.empty() ? "identical" : diff.c_str(), sys_err) +
             counts + fmt("%.1f s", seconds_since(t0)));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  std::printf("%d of 12 criteria pass\n", 12 - failures);
  return failures ? 1 : 0;
}
