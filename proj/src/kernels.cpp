#include "covstat/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "covstat/errors.hpp"

namespace covstat {

using std::numbers::pi;

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

template <typename F>
double gk(F f, double a, double b, double abs_tol, int max_depth) {
  double err = 0, l1 = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, 1e-10, &err, &l1);
  if (!std::isfinite(v) || (err > abs_tol && err > 1e-8 * l1))
    throw QuadratureFailure("Gauss-Kronrod on [" + std::to_string(a) + ", " + std::to_string(b) +
                            "] stalled with error estimate " + fmt_g(err) + " (L1 " + fmt_g(l1) + ")");
  return v;
}

// int_a^b f split into panels holding about two periods of cos(freq * s)
template <typename F>
double gk_oscillatory(F f, double a, double b, double freq, double abs_tol, int max_depth) {
  int panels = std::max(1, static_cast<int>(std::ceil(std::abs(freq) * (b - a) / (4 * pi))));
  double step = (b - a) / panels, total = 0;
  for (int k = 0; k < panels; ++k) total += gk(f, a + k * step, a + (k + 1) * step, abs_tol, max_depth);
  return total;
}

// psi(x) decays like exp(-sqrt(2 rho |x|)); past this it is below 1e-18
double psi_negligible_beyond(const TestFunctionSpec& spec) { return 1250 / spec.support_radius; }

double bump01(double s) {  // exp(-1/(1-s^2)) on |s| < 1
  double d = 1 - s * s;
  return d <= 0 ? 0.0 : std::exp(-1 / d);
}

// The smooth weight: b(t) = bump01(2t) on |t| < 1/2,
// w_hat(s) = (b*b)(s) / (2 pi (b*b)(0)), w(x) = |b^(x)|^2 / (2 pi (b*b)(0)).
struct SmoothWeightData {
  double A0 = 0;
  double window = 0;  // beyond this |u| the weight is below 1e-18

  SmoothWeightData() {
    A0 = gk([](double t) { return std::pow(bump01(2 * t), 2); }, -0.5, 0.5, 1e-15, 20);
    for (double u = 0;; u += 1.0) {
      bool small = true;
      for (double v = u; v < u + 1 && small; v += 0.125) small = w(v) < 1e-18;
      if (small && u > 20) {
        window = u;
        break;
      }
    }
  }
  double b_hat(double x) const {
    return 2 * gk_oscillatory([x](double t) { return bump01(2 * t) * std::cos(x * t); }, 0.0, 0.5, x, 1e-17, 12);
  }
  double w(double x) const { return std::pow(b_hat(x), 2) / (2 * pi * A0); }
  double w_hat(double s) const {
    s = std::abs(s);
    if (s >= 1) return 0;
    double A = gk([s](double t) { return bump01(2 * t) * bump01(2 * (s - t)); }, s - 0.5, 0.5, 1e-16, 20);
    return A / (2 * pi * A0);
  }
};

const SmoothWeightData& smooth_weight() {
  static const SmoothWeightData data;
  return data;
}

}  // namespace

TestFunctionSpec TestFunctionSpec::bump(double radius, double amplitude) {
  TestFunctionSpec s;
  s.support_radius = radius;
  s.amplitude = amplitude;
  s.validate();
  return s;
}

void TestFunctionSpec::validate() const {
  if (family != "bump") throw ConfigError("unknown psi family '" + family + "' (available: bump)");
  if (!(support_radius > 0 && support_radius <= 1)) throw ConfigError("psi support radius must be in (0, 1]");
}

double psi_hat_eval(const TestFunctionSpec& spec, double s) {
  return spec.amplitude * std::numbers::e * bump01(s / spec.support_radius);
}

double psi_eval(const TestFunctionSpec& spec, double x, const QuadratureConfig& q) {
  if (spec.amplitude == 0) return 0;
  x = std::abs(x);  // even by construction
  // past the cutoff the panels only resolve cancellation noise
  if (x > psi_negligible_beyond(spec)) return 0;
  return 2 * gk_oscillatory([&](double s) { return psi_hat_eval(spec, s) * std::cos(s * x); }, 0.0,
                            spec.support_radius, x, q.abs_tol / 2, q.max_depth);
}

double psi_eval_tanh_sinh(const TestFunctionSpec& spec, double x) {
  if (spec.amplitude == 0) return 0;
  boost::math::quadrature::tanh_sinh<double> ts;
  int panels = std::max(1, static_cast<int>(std::ceil(std::abs(x) * spec.support_radius / pi)));
  double step = spec.support_radius / panels, total = 0;
  for (int k = 0; k < panels; ++k)
    total += ts.integrate([&](double s) { return psi_hat_eval(spec, s) * std::cos(s * x); }, k * step, (k + 1) * step);
  return 2 * total;
}

std::vector<double> h_hat_by_quadrature(const TestFunctionSpec& spec, const WindowParams& p,
                                        const std::vector<double>& zetas, const QuadratureConfig& q) {
  p.validate();
  double zmax = 0;
  for (double z : zetas) zmax = std::max(zmax, std::abs(z));
  const double step = 2 * pi / (p.L * spec.support_radius + zmax) / 1.25;
  const double X = psi_negligible_beyond(spec);
  const double R = std::abs(p.alpha) + X / p.L;
  std::vector<double> r, h;
  for (long m = 0; m * step <= R; ++m) {
    r.push_back(m * step);
    h.push_back(h_eval(spec, p, m * step, q));
  }
  std::vector<double> out;
  for (double z : zetas) {
    double s = h[0];
    for (std::size_t m = 1; m < r.size(); ++m) s += 2 * h[m] * std::cos(z * r[m]);
    out.push_back(s * step / (2 * pi));
  }
  return out;
}

void WindowParams::validate() const {
  if (!(L > 0)) throw ConfigError("window parameter L must be positive");
  if (!(T > 0)) throw ConfigError("averaging scale T must be positive");
}

double h_eval(const TestFunctionSpec& spec, const WindowParams& p, double r, const QuadratureConfig& q) {
  return psi_eval(spec, p.L * (r - p.alpha), q) + psi_eval(spec, p.L * (r + p.alpha), q);
}

double h_hat_eval(const TestFunctionSpec& spec, const WindowParams& p, double zeta) {
  return 2 * std::cos(p.alpha * zeta) / p.L * psi_hat_eval(spec, zeta / p.L);
}

double sigma_goe(const TestFunctionSpec& spec, const QuadratureConfig& q) {
  if (spec.amplitude == 0) return 0;
  return 4 * gk([&](double x) { return x * std::pow(psi_hat_eval(spec, x), 2); }, 0.0, spec.support_radius,
                q.abs_tol, q.max_depth);
}

double sigma_goe_tanh_sinh(const TestFunctionSpec& spec) {
  if (spec.amplitude == 0) return 0;
  boost::math::quadrature::tanh_sinh<double> ts;
  return 4 * ts.integrate([&](double x) { return x * std::pow(psi_hat_eval(spec, x), 2); }, 0.0, spec.support_radius);
}

double sigma_for_character(const TestFunctionSpec& spec, const Character& chi, const QuadratureConfig& q) {
  double goe = sigma_goe(spec, q);
  return char_symmetry_class(chi) == SymmetryClass::GOE ? goe : goe / 2;
}

double n_det(int n, int g, const TestFunctionSpec& spec, const WindowParams& p, const QuadratureConfig& q) {
  if (g < 2) throw ConfigError("n_det needs genus >= 2");
  p.validate();
  if (spec.amplitude == 0) return 0;
  // h is even and r tanh(pi r) is even, so the two bumps of h contribute
  // equally: int h r tanh = (2/L) int psi(x) (alpha + x/L) tanh(pi (alpha + x/L)) dx
  auto f = [&](double x) {
    double r = p.alpha + x / p.L;
    return psi_eval(spec, x, q) * r * std::tanh(pi * r);
  };
  // psi decays like exp(-sqrt(2 rho x)); cut where a generous envelope of the
  // integrand drops far below the tolerance
  const double rho = spec.support_radius, amp = std::abs(spec.amplitude);
  auto envelope = [&](double x) {
    return 100 * amp * std::sqrt(1 + x) * std::exp(-std::sqrt(2 * rho * x)) * (std::abs(p.alpha) + x / p.L + 1);
  };
  double X = 20;
  while (envelope(X) * X > q.abs_tol * 1e-2) X *= 1.25;
  // psi is band-limited to rho and tanh(pi r) is analytic in a strip of half
  // width L/2 in x, so the trapezoid rule converges like
  // exp(-(2 pi / step - rho) L / 2); pick the step for exp(-35).
  const double step = std::min(0.5, 2 * pi / (rho + 70 / p.L));
  double total = f(0);
  for (double x = step; x <= X; x += step) total += f(x) + f(-x);
  total *= step;
  return n * (g - 1) * 2 / p.L * total;
}

WeightSpec WeightSpec::parse(const std::string& name) {
  if (name == "fejer") return fejer();
  if (name == "smooth") return smooth();
  throw ConfigError("unknown weight '" + name + "' (available: fejer, smooth)");
}

double w_eval(const WeightSpec& W, double x) {
  if (W.family == WeightSpec::Family::Smooth) return smooth_weight().w(x);
  if (std::abs(x) < 1e-8) return 1 / (2 * pi);
  double s = std::sin(x / 2) / (x / 2);
  return s * s / (2 * pi);
}

double w_hat_eval(const WeightSpec& W, double s) {
  if (W.family == WeightSpec::Family::Smooth) return smooth_weight().w_hat(s);
  return std::max(0.0, 1 - std::abs(s)) / (2 * pi);
}

AlphaRule alpha_rule(const WeightSpec& W, double T, double bandwidth, const QuadratureConfig& q) {
  if (!(T > 0)) throw ConfigError("T must be positive");
  // integrand band in u: T * bandwidth from F plus 1 from w
  const double step = std::min(0.25, 2 * pi / (T * bandwidth + 1) / 1.1);
  const double U = W.family == WeightSpec::Family::Smooth ? smooth_weight().window : q.fejer_window;
  AlphaRule rule;
  double mass = 0;
  for (long m = 0; m * step <= U; ++m) {
    double u = m * step;
    double wt = step * w_eval(W, u) * (m == 0 ? 1 : 2);
    rule.u.push_back(u);
    rule.weight.push_back(wt);
    mass += wt;
  }
  // the untruncated trapezoid sum of a band-limited w is exactly 1
  rule.tail_mass = std::max(0.0, 1 - mass);
  return rule;
}

double expect_over_alpha(const std::function<double(double)>& F, double T, const WeightSpec& W, double bandwidth,
                         const QuadratureConfig& q) {
  AlphaRule rule = alpha_rule(W, T, bandwidth, q);
  double sum = 0, outer = 0;
  long outer_n = 0;
  const double U = rule.u.back();
  for (std::size_t m = 0; m < rule.u.size(); ++m) {
    double a = T * rule.u[m];
    double v = m == 0 ? F(0) : 0.5 * (F(a) + F(-a));
    sum += rule.weight[m] * v;
    if (rule.u[m] > 0.9 * U) outer += v, ++outer_n;
  }
  // Fejer tails: assume the far tail sees the same average as the outer rim
  if (rule.tail_mass > 0 && outer_n) sum += rule.tail_mass * outer / outer_n;
  return sum;
}

}  // namespace covstat
