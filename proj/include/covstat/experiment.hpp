#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "covstat/group.hpp"
#include "covstat/kernels.hpp"
#include "covstat/mc.hpp"
#include "covstat/spectrum.hpp"

namespace covstat {

// Centered oscillating statistic of the limit model with the per-class
// coefficients folded together: T = (2/L) sum_j sum_d d S_{j,d} (Z_{j,d} - 1/d)
// where S_{j,d} = sum over multiples a of d of s(g_j, a) cos(alpha a l_j).
class LimitStatistic {
 public:
  LimitStatistic(const GeodesicTerms& terms, const WindowParams& p);
  double sample(Rng& rng) const;

 private:
  double scale_ = 0;
  std::vector<double> coeff_;    // d S_{j,d}, flattened
  std::vector<double> expneg_;   // exp(-1/d) per slot
  std::vector<double> lambda_;   // 1/d per slot
};

struct ExperimentConfig {
  std::string experiment = "clt";  // clt | energy-variance | diag-trend
  std::string mode = "limit";      // limit | finite-n
  int n = 6;
  int g = 2;
  std::string sampler = "rejection";  // finite-n: rejection | enumerate (n <= 4)
  double alpha = 50;
  std::vector<double> L{10};
  std::vector<double> T;  // paired with L for energy-variance and diag-trend
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::uint64_t max_attempts = 100000000;
  std::string spectrum = "builtin:bolza";
  double cutoff = 10;
  std::string chi = "trivial";  // "trivial" or comma-separated angles, one per generator
  TestFunctionSpec psi;
  QuadratureConfig quad;
  WeightSpec weight;
  int max_k = 6;
  int dual_route_draws = 0;  // energy-variance: draws also run through the quadrature route
  int jobs = 1;
};

// Unknown keys, wrong types and out-of-range values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
Character parse_character(const std::string& text, int genus);

// "builtin:<model>" enumerates (or reads from the cache directory when one is
// given); anything else is a spectrum CSV path.
LengthSpectrum resolve_spectrum(const std::string& source, double cutoff, const std::string& cache_dir);
std::string spectrum_cache_name(const std::string& model, double cutoff, int horizon);

struct Report {
  nlohmann::json body;  // schema v1; deterministic given config, seed and jobs
  std::string csv;      // L,T,k,estimate,se,exact_ref
  // kept out of body: results do not depend on either, so reports stay byte-identical
  double seconds = 0;
  int jobs = 1;
  bool all_flags_pass() const;
};

Report run_experiment(const ExperimentConfig& cfg, const LengthSpectrum& spectrum);
void write_report(const Report& r, const std::string& dir);

// 15 significant digits, as reported everywhere
double round15(double x);

}  // namespace covstat
