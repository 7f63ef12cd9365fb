// covstat command line: spectra, cover samples, exact moments and the Monte
// Carlo experiments. Exit codes: 0 success, 1 failed check or runtime error,
// 2 usage error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "covstat/errors.hpp"
#include "covstat/experiment.hpp"
#include "covstat/moments.hpp"
#include "covstat/perm.hpp"
#include "covstat/spectrum.hpp"
#include "covstat/verify.hpp"

using namespace covstat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string cache_root() {
  const char* env = std::getenv("COVSTAT_CACHE");
  return env ? env : "";
}

// runtime failures (bad data, failed quadrature, ...) as opposed to usage errors
struct CheckFailed {};

int cmd_spectrum_build(const std::string& model, double cutoff, int horizon, const std::string& out) {
  EnumerationOptions opt;
  opt.horizon = horizon;
  EnumerationStats stats;
  const std::string cache = cache_root();
  fs::path cached = cache.empty() ? fs::path() : fs::path(cache) / spectrum_cache_name(model, cutoff, horizon);
  LengthSpectrum s;
  if (!cached.empty() && fs::exists(cached)) {
    s = load_spectrum(cached.string());
    std::cerr << "cache hit: " << cached.string() << "\n";
  } else {
    s = enumerate_spectrum(builtin_model(model), cutoff, opt, &stats);
    if (!cached.empty()) {
      fs::create_directories(cached.parent_path());
      save_spectrum(s, cached.string());
    }
    std::cerr << "classes " << s.classes.size() << ", horizon " << s.horizon_word_length
              << (stats.exhausted ? ", complete (pruned walk exhausted)" : ", stable at horizon") << "\n";
  }
  if (out.empty()) {
    std::printf("classes=%zu systole=%.13f\n", s.classes.size(), s.systole());
  } else {
    save_spectrum(s, out);
  }
  return 0;
}

int cmd_spectrum_inspect(const std::string& source, double cutoff) {
  auto s = resolve_spectrum(source, cutoff, cache_root());
  json j{{"model", s.model},
         {"cutoff", s.cutoff},
         {"classes", s.classes.size()},
         {"horizon_word_length", s.horizon_word_length},
         {"systole", round15(s.systole())},
         {"systole_closed_form", round15(2 * std::acosh(1 + std::sqrt(2.0)))}};
  json counts = json::array();
  for (double T = 4; T <= s.cutoff + 1e-9; T += 1) {
    const double N0 = counting_N0(s, T);
    counts.push_back({{"T", T}, {"N0", N0}, {"N", counting_N(s, T)}, {"N0_T_over_eT", round15(N0 * T / std::exp(T))}});
  }
  j["counting"] = counts;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_homs_sample(int n, int g, std::uint64_t count, std::uint64_t seed, std::uint64_t max_attempts,
                    const std::string& out) {
  const std::string cache = cache_root();
  char name[128];
  std::snprintf(name, sizeof name, "homs-n%d-g%d-s%llu-c%llu.json", n, g, static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(count));
  fs::path cached = cache.empty() ? fs::path() : fs::path(cache) / name;
  std::vector<HomSample> batch;
  if (!cached.empty() && fs::exists(cached)) {
    batch = load_hom_batch(cached.string());
  } else {
    for (std::uint64_t i = 0; i < count; ++i) {
      Rng rng(seed, i);
      batch.push_back(sample_uniform_hom(n, g, rng, max_attempts).hom);
    }
    if (!cached.empty()) {
      fs::create_directories(cached.parent_path());
      save_hom_batch(cached.string(), batch, seed);
    }
  }
  if (!out.empty()) save_hom_batch(out, batch, seed);
  std::printf("%zu samples\n", batch.size());
  return 0;
}

int cmd_moments_exact(int k, const std::vector<int>& powers, const std::vector<double>& Ls, double alpha,
                      const std::string& chi_text, const std::string& spectrum, double cutoff, bool as_json) {
  if (!powers.empty()) {
    if (static_cast<int>(powers.size()) != k)
      throw ConfigError("--k " + std::to_string(k) + " needs exactly " + std::to_string(k) + " powers");
    auto R = R_exact(LimitMomentKey(powers));
    if (as_json) {
      std::cout << json{{"powers", powers}, {"R", to_string(R)}, {"value", round15(to_double(R))}}.dump(2) << "\n";
    } else {
      std::cout << to_string(R) << "\n";
    }
    return 0;
  }
  if (Ls.empty()) throw ConfigError("give either powers (--a, --b, ... or --powers) or --L");
  if (k < 1 || k > kMaxMomentOrder) throw ConfigError("--k must be in 1..6");
  double reach = 0;
  for (double L : Ls) reach = std::max(reach, L);
  auto s = resolve_spectrum(spectrum, std::max(cutoff, reach), cache_root());
  auto spec = TestFunctionSpec::bump();
  Character chi = parse_character(chi_text, s.genus);
  const double sigma2 = sigma_for_character(spec, chi);
  MomentTable table;
  json rows = json::array();
  for (double L : Ls) {
    WindowParams p{alpha, L, 1};
    auto terms = geodesic_terms(s, L, chi, spec);
    json parts = json::array();
    for (const auto& r : partitions(k)) {
      BigRational coeff(multinomial(k, r), sym_count(r));
      parts.push_back({{"partition", r.parts},
                       {"coefficient", to_string(coeff)},
                       {"B", round15(B_eval(r, terms, p, &table))}});
    }
    const double v = central_moment_limit(k, terms, p, &table);
    rows.push_back({{"L", L},
                    {"value", round15(v)},
                    {"partitions", parts},
                    {"gaussian_moment_of_sigma2", k >= 2 ? round15(gaussian_moment(k, sigma2)) : 0.0}});
    if (!as_json) std::printf("L=%g V^(%d)=%.15g\n", L, k, v);
  }
  if (as_json)
    std::cout << json{{"k", k}, {"alpha", alpha}, {"chi", chi_text}, {"sigma2", round15(sigma2)}, {"rows", rows}}.dump(2)
              << "\n";
  return 0;
}

int cmd_run(const std::string& experiment, const std::string& config_path, const std::string& out,
            std::optional<std::uint64_t> seed, std::optional<int> jobs) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open config " + config_path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.contains("experiment") && j["experiment"] != experiment)
    throw ConfigError("config is for experiment '" + j["experiment"].get<std::string>() + "'");
  j["experiment"] = experiment;
  if (seed) j["seed"] = *seed;
  if (jobs) j["jobs"] = *jobs;
  auto cfg = parse_config(j);
  auto s = resolve_spectrum(cfg.spectrum, cfg.cutoff, cache_root());
  auto report = run_experiment(cfg, s);
  const std::string dir = out.empty() ? "runs/" + experiment + "-seed" + std::to_string(cfg.seed) : out;
  write_report(report, dir);
  for (auto& [name, ok] : report.body["flags"].items()) std::printf("%s %s\n", ok.get<bool>() ? "PASS" : "FAIL", name.c_str());
  std::printf("report written to %s (%.1f s)\n", dir.c_str(), report.seconds);
  return report.all_flags_pass() ? 0 : 1;
}

int cmd_verify() {
  bool ok = true;
  for (const auto& c : identity_checks()) {
    std::printf("%s %s (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluctuation statistics of random covers of a hyperbolic surface"};
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("spectrum", "primitive length spectrum of a built-in surface");
  spectrum->require_subcommand(1);
  std::string model = "bolza", out, source = "builtin:bolza";
  double cutoff = 10;
  int horizon = 0;
  auto* sp_build = spectrum->add_subcommand("build", "enumerate primitive classes up to a cutoff");
  sp_build->add_option("--model", model, "built-in model name");
  sp_build->add_option("--cutoff", cutoff, "length cutoff L_max")->check(CLI::PositiveNumber);
  sp_build->add_option("--horizon", horizon, "enumeration word-length horizon (0 = automatic)");
  sp_build->add_option("--out", out, "CSV output path");
  auto* sp_inspect = spectrum->add_subcommand("inspect", "summary and counting functions of a spectrum");
  sp_inspect->add_option("--spectrum", source, "builtin:<model> or a spectrum CSV");
  sp_inspect->add_option("--cutoff", cutoff, "length cutoff for built-in models")->check(CLI::PositiveNumber);

  auto* homs = app.add_subcommand("homs", "homomorphisms from the surface group to S_n");
  homs->require_subcommand(1);
  int n = 3, g = 2;
  std::uint64_t count = 100, seed = 1, max_attempts = 100000000;
  auto* h_sample = homs->add_subcommand("sample", "uniform samples by rejection");
  auto* h_count = homs->add_subcommand("count", "|Hom| from the character formula");
  auto* h_enum = homs->add_subcommand("enumerate", "|Hom| by exhaustive enumeration (n <= 4)");
  for (auto* c : {h_sample, h_count, h_enum}) {
    c->add_option("--n", n, "degree")->required()->check(CLI::PositiveNumber);
    c->add_option("--g", g, "genus")->check(CLI::Range(2, 64));
  }
  h_sample->add_option("--count", count, "number of samples");
  h_sample->add_option("--seed", seed, "random seed");
  h_sample->add_option("--max-attempts", max_attempts, "rejection attempts per sample");
  h_sample->add_option("--out", out, "JSON output path");

  auto* moments = app.add_subcommand("moments", "limit moments");
  moments->require_subcommand(1);
  auto* m_exact = moments->add_subcommand("exact", "exact limit moments");
  int k = 2;
  std::vector<int> powers;
  int pa = 0, pb = 0, pc = 0, pd = 0;
  std::vector<double> Ls;
  double alpha = 50;
  std::string chi = "trivial";
  bool as_json = false;
  m_exact->add_option("--k", k, "moment order");
  m_exact->add_option("--a", pa, "first power (R(a, b, ...) mode)");
  m_exact->add_option("--b", pb, "second power");
  m_exact->add_option("--c", pc, "third power");
  m_exact->add_option("--d", pd, "fourth power");
  m_exact->add_option("--powers", powers, "all powers, for any k")->delimiter(',');
  m_exact->add_option("--L", Ls, "window parameter(s): prints the limit central moment V^(k)(L)")->delimiter(',');
  m_exact->add_option("--alpha", alpha, "window height");
  m_exact->add_option("--chi", chi, "'trivial' or comma-separated angles, one per generator");
  m_exact->add_option("--spectrum", source, "builtin:<model> or a spectrum CSV");
  m_exact->add_option("--cutoff", cutoff, "length cutoff for built-in models");
  m_exact->add_flag("--json", as_json, "JSON output");

  std::string config;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> jobs;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  for (const char* name : {"clt", "energy-variance", "diag-trend"}) {
    auto* group = app.add_subcommand(name, std::string(name) + " experiment");
    group->require_subcommand(1);
    auto* run = group->add_subcommand("run", "run from a JSON config");
    run->add_option("--config", config, "JSON config")->required();
    run->add_option("--seed", run_seed, "override the config seed");
    run->add_option("--jobs", jobs, "worker threads");
    run->add_option("--out", out, "output directory");
    runs.emplace_back(name, run);
  }

  auto* verify = app.add_subcommand("verify", "exact and analytic identity checks");

  auto* cache = app.add_subcommand("cache", "cache directory (set COVSTAT_CACHE)");
  cache->require_subcommand(1);
  auto* c_path = cache->add_subcommand("path", "print the cache directory");
  auto* c_clear = cache->add_subcommand("clear", "delete cached spectra and cover batches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sp_build) return cmd_spectrum_build(model, cutoff, horizon, out);
    if (*sp_inspect) return cmd_spectrum_inspect(source, cutoff);
    if (*h_sample) return cmd_homs_sample(n, g, count, seed, max_attempts, out);
    if (*h_count) {
      std::cout << hom_count_formula(n, g).str() << "\n";
      return 0;
    }
    if (*h_enum) {
      std::cout << enumerate_homs(n, g, [](const HomSample&) {}) << "\n";
      return 0;
    }
    if (*m_exact) {
      if (powers.empty())
        for (int p : {pa, pb, pc, pd})
          if (p) powers.push_back(p);
      return cmd_moments_exact(k, powers, Ls, alpha, chi, source, cutoff, as_json);
    }
    for (auto& [name, run] : runs)
      if (*run) return cmd_run(name, config, out, run_seed, jobs);
    if (*verify) return cmd_verify();
    if (*c_path) {
      std::cout << (cache_root().empty() ? "(COVSTAT_CACHE not set)" : cache_root()) << "\n";
      return 0;
    }
    if (*c_clear) {
      if (cache_root().empty()) throw ConfigError("COVSTAT_CACHE is not set");
      std::uintmax_t removed = 0;
      for (const auto& e : fs::directory_iterator(cache_root())) {
        const auto name = e.path().filename().string();
        if (name.rfind("spectrum-", 0) == 0 || name.rfind("homs-", 0) == 0) removed += fs::remove(e.path());
      }
      std::printf("removed %ju files\n", removed);
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DegreeTooLarge& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
