#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "covstat/errors.hpp"
#include "covstat/group.hpp"

namespace covstat {

template <typename Scalar>
using Mobius = Eigen::Matrix<Scalar, 2, 2>;

inline constexpr double kHyperbolicSlack = 1e-9;

template <typename Derived>
typename Derived::Scalar translation_length(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::acosh;
  const Scalar t = abs(M.trace());
  if (!(t > Scalar(2) + Scalar(kHyperbolicSlack)))
    throw NotHyperbolic("matrix with |trace| = " + std::to_string(static_cast<double>(t)) + " is not hyperbolic");
  return Scalar(2) * acosh(t / Scalar(2));
}

template <typename Scalar>
Scalar length_from_trace(Scalar trace) {
  using std::abs;
  using std::acosh;
  return Scalar(2) * acosh(abs(trace) / Scalar(2));
}

template <typename Derived>
bool is_plus_minus_identity(const Eigen::MatrixBase<Derived>& M, double tol) {
  using Scalar = typename Derived::Scalar;
  const auto I = Mobius<Scalar>::Identity();
  return (M - I).cwiseAbs().maxCoeff() <= tol || (M + I).cwiseAbs().maxCoeff() <= tol;
}

struct FuchsianModel {
  std::string name;
  SurfaceGroup group{2};
  std::vector<Mobius<long double>> gens;  // a1, b1, a2, b2, ...
  std::vector<Mobius<long double>> inv;
  // Enumeration basis: words in the generators. The spectrum walk runs over
  // cyclic words in these; side pairings of a Dirichlet domain need far
  // shorter words per unit of length than a1, b1, ...
  std::vector<Word> basis;
  // Optional geometry of the basis, used to prune the walk. If the basis are
  // the side pairings of a Dirichlet domain centred at i with circumradius r,
  // every closed geodesic of length l has a cutting sequence whose prefixes P
  // all satisfy d(i, P i) <= l + 2r, and which never runs through more than
  // half of the vertex-cycle relator.
  std::optional<SurfaceGroup> basis_group;
  double dirichlet_radius = 0;
};

Mobius<long double> basis_matrix(const FuchsianModel& m, Letter x);

// Text format: "genus g" line, one line per generator "a1 m00 m01 m10 m11",
// and optionally 2g lines "basis <word>" giving the enumeration basis, a
// "basis_relator" line (signed 1-based basis indices) and "dirichlet_radius".
FuchsianModel load_model(const std::string& path);
FuchsianModel builtin_model(const std::string& name = "bolza");
std::string data_dir();

template <typename Scalar>
Mobius<Scalar> word_to_matrix(const FuchsianModel& m, const Word& w) {
  Mobius<Scalar> M = Mobius<Scalar>::Identity();
  for (Letter x : w.letters) {
    const auto& G = x.inverted() ? m.inv[x.index()] : m.gens[x.index()];
    M = (M * G.template cast<Scalar>()).eval();
  }
  return M;
}

struct PrimitiveGeodesic {
  ConjClassKey key;  // empty word for synthetic spectra
  double length = 0;
  double trace = 0;
  int word_length = 0;
};

struct LengthSpectrum {
  double cutoff = 0;
  int genus = 2;
  int horizon_word_length = 0;
  bool has_words = true;
  std::string model;
  std::vector<PrimitiveGeodesic> classes;  // sorted by length, then key

  double systole() const { return classes.empty() ? 0.0 : classes.front().length; }
  // the first classes up to (and including) length < L
  LengthSpectrum truncated(double L) const;
};

struct EnumerationOptions {
  int horizon = 0;            // 0 = pick automatically
  int max_horizon = 16;
  bool allow_empty = false;   // L_max below the systole returns an empty list instead of throwing
  bool merge_conjugates = true;
};

struct EnumerationStats {
  long long lyndon_words = 0;
  long long candidates = 0;       // words with length <= cutoff
  long long merged_conjugates = 0;  // keys found conjugate by matrix search
  long long dropped_powers = 0;
  bool exhausted = false;  // the pruned walk died out: the class list is provably complete
  std::vector<long long> new_classes_by_word_length;  // index = basis word length
};

LengthSpectrum enumerate_spectrum(const FuchsianModel& m, double L_max, const EnumerationOptions& opt = {},
                                  EnumerationStats* stats = nullptr);

// Compares the class lists of two spectra below L; returns a description of
// the first difference, or an empty string.
std::string compare_spectra(const LengthSpectrum& a, const LengthSpectrum& b, double L);

double counting_N0(const LengthSpectrum& s, double T);
double counting_N(const LengthSpectrum& s, double T);
double counting_Nchi(const LengthSpectrum& s, double T, const Character& chi);

void save_spectrum(const LengthSpectrum& s, const std::string& path);
LengthSpectrum load_spectrum(const std::string& path);

}  // namespace covstat
