#pragma once

#include <functional>
#include <string>
#include <vector>

#include "covstat/group.hpp"

namespace covstat {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_depth = 15;
  // Fejer weight only: half-width of the u = alpha/T window before the tail
  // correction kicks in (the Fejer kernel has 1/u^2 tails)
  double fejer_window = 4000;
};

// psi_hat(s) = amplitude * e * exp(-1 / (1 - (s/rho)^2)) on |s| < rho, so
// psi_hat(0) = amplitude. psi(x) = int psi_hat(s) e^{isx} ds.
struct TestFunctionSpec {
  std::string family = "bump";
  double support_radius = 1.0;
  double amplitude = 1.0;

  static TestFunctionSpec bump(double radius = 1.0, double amplitude = 1.0);
  void validate() const;
};

double psi_hat_eval(const TestFunctionSpec& spec, double s);
double psi_eval(const TestFunctionSpec& spec, double x, const QuadratureConfig& q = {});
// same integral by tanh-sinh instead of Gauss-Kronrod, for cross-checks
double psi_eval_tanh_sinh(const TestFunctionSpec& spec, double x);

struct WindowParams {
  double alpha = 0;
  double L = 1;
  double T = 1;
  void validate() const;
};

double h_eval(const TestFunctionSpec& spec, const WindowParams& p, double r, const QuadratureConfig& q = {});
// (2 cos(alpha zeta) / L) psi_hat(zeta / L)
double h_hat_eval(const TestFunctionSpec& spec, const WindowParams& p, double zeta);

// (1/2pi) int h(r) e^{-i zeta r} dr evaluated directly from samples of h. h is
// band-limited (to L rho), so a trapezoid rule fine enough for the largest
// zeta is exact up to the truncation of the psi tails.
std::vector<double> h_hat_by_quadrature(const TestFunctionSpec& spec, const WindowParams& p,
                                        const std::vector<double>& zetas, const QuadratureConfig& q = {});

// 2 int |x| psi_hat(x)^2 dx
double sigma_goe(const TestFunctionSpec& spec, const QuadratureConfig& q = {});
double sigma_goe_tanh_sinh(const TestFunctionSpec& spec);
double sigma_for_character(const TestFunctionSpec& spec, const Character& chi, const QuadratureConfig& q = {});

// n (g-1) int h(r) r tanh(pi r) dr
double n_det(int n, int g, const TestFunctionSpec& spec, const WindowParams& p, const QuadratureConfig& q = {});

// Averaging weight over the window height. Both families are even,
// nonnegative, integrate to 1 and have w_hat supported in [-1, 1].
//   Fejer:  w(x) = (1/2pi) (sin(x/2)/(x/2))^2, w_hat triangular.
//   Smooth: w_hat = bump autocorrelation (C-infinity), w = |FT bump|^2, fast tails.
struct WeightSpec {
  enum class Family { Fejer, Smooth };
  Family family = Family::Fejer;

  static WeightSpec fejer() { return {Family::Fejer}; }
  static WeightSpec smooth() { return {Family::Smooth}; }
  static WeightSpec parse(const std::string& name);
  std::string name() const { return family == Family::Fejer ? "fejer" : "smooth"; }
};

double w_eval(const WeightSpec& W, double x);
double w_hat_eval(const WeightSpec& W, double s);

// Quadrature rule for E_T[F] = int F(T u) w(u) du over u. The trapezoid rule
// on a uniform grid is exact (Poisson summation) for integrands band-limited
// below 2 pi / step, so F must have alpha-frequencies <= bandwidth. Truncated
// where w is negligible; for Fejer the remaining tail mass is handed back so
// callers can correct for the mean of F.
struct AlphaRule {
  std::vector<double> u;       // nodes (u = alpha / T), symmetric, u >= 0 only
  std::vector<double> weight;  // step * w(u), doubled for u > 0
  double tail_mass = 0;        // int_{|u| > U} w
};
AlphaRule alpha_rule(const WeightSpec& W, double T, double bandwidth, const QuadratureConfig& q = {});

// F must be even in alpha (true for all statistics here) and band-limited.
double expect_over_alpha(const std::function<double(double)>& F, double T, const WeightSpec& W, double bandwidth,
                         const QuadratureConfig& q = {});

}  // namespace covstat
