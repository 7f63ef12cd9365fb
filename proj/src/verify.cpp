#include "covstat/verify.hpp"

#include <cmath>
#include <cstdio>

#include "covstat/combinatorics.hpp"
#include "covstat/kernels.hpp"
#include "covstat/moments.hpp"
#include "covstat/perm.hpp"

namespace covstat {

namespace {

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

std::vector<CheckResult> identity_checks() {
  std::vector<CheckResult> out;

  {
    int bad = 0;
    for (int a = 1; a <= 24; ++a)
      for (int b = 1; b <= 24; ++b)
        if (R_exact(LimitMomentKey({a, b})) != BigRational(G(a, b))) ++bad;
    out.push_back({"R(a,b) = sigma(gcd(a,b)) for 1 <= a,b <= 24", bad == 0, std::to_string(bad) + " mismatches"});
  }
  {
    auto inner = limit_cross_moment({LimitMomentKey({2, 3})}, false);
    auto full = limit_cross_moment({LimitMomentKey({2, 3}), LimitMomentKey({4})}, false);
    out.push_back({"E[F(g^2)F(g^3)F(d^4)] = 15 and E[F(g^2)F(g^3)] = 5", full == 15 && inner == 5,
                   to_string(full) + ", " + to_string(inner)});
  }
  for (int n = 2; n <= 4; ++n) {
    auto enumerated = enumerate_homs(n, 2, [](const HomSample&) {});
    auto formula = hom_count_formula(n, 2);
    out.push_back({"|Hom(surface group of genus 2, S_" + std::to_string(n) + ")| enumeration = character formula",
                   BigInt(enumerated) == formula, std::to_string(enumerated) + " vs " + formula.str()});
  }
  {
    auto spec = TestFunctionSpec::bump();
    WindowParams p{2.0, 5.0, 1.0};
    std::vector<double> zetas;
    for (int i = 0; i < 100; ++i) zetas.push_back(-6.0 + 12.0 * i / 99);
    auto quad = h_hat_by_quadrature(spec, p, zetas);
    double worst = 0;
    for (std::size_t i = 0; i < zetas.size(); ++i) worst = std::max(worst, std::abs(quad[i] - h_hat_eval(spec, p, zetas[i])));
    out.push_back({"h_hat closed form vs quadrature (100 zeta points)", worst <= 1e-6, fmt("max error %.3g", worst)});
  }
  for (auto W : {WeightSpec::fejer(), WeightSpec::smooth()}) {
    double worst = 0;
    for (double T : {8.0, 32.0})
      for (double x : {0.5, 1.0, 3.0}) {
        double e = expect_over_alpha([x](double a) { return std::cos(a * x); }, T, W, x);
        worst = std::max(worst, std::abs(e - 2 * M_PI * w_hat_eval(W, T * x)));
      }
    out.push_back({"E_T[cos(alpha x)] = 2 pi w_hat(T x), " + W.name() + " weight", worst <= 1e-6,
                   fmt("max error %.3g", worst)});
  }
  {
    auto spec = TestFunctionSpec::bump();
    const double goe = sigma_for_character(spec, Character::trivial(2));
    const double gue = sigma_for_character(spec, Character::from_angles({1.0, std::sqrt(2.0), std::sqrt(3.0), std::sqrt(5.0)}));
    out.push_back({"Sigma^2 GUE = Sigma^2 GOE / 2", gue == goe / 2, fmt("%.15g vs %.15g", gue, goe)});
  }
  return out;
}

}  // namespace covstat
