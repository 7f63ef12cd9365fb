#include "covstat/spectrum.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/LU>

namespace covstat {

#ifndef COVSTAT_DATA_DIR_DEFAULT
#define COVSTAT_DATA_DIR_DEFAULT "data"
#endif

std::string data_dir() {
  if (const char* env = std::getenv("COVSTAT_DATA_DIR"); env && *env) return env;
  return COVSTAT_DATA_DIR_DEFAULT;
}

using Mat = Mobius<long double>;

namespace {

std::vector<Word> reduced_words_up_to(int genus, int maxlen) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int len = 1; len <= maxlen; ++len) {
    std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int c = 0; c < 4 * genus; ++c) {
        Letter x{static_cast<std::uint8_t>(c)};
        if (!out[i].empty() && out[i].letters.back() == x.inverse()) continue;
        Word w = out[i];
        w.letters.push_back(x);
        w.reduced = true;
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

}  // namespace

FuchsianModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path);
  FuchsianModel m;
  int genus = 0;
  std::map<int, Mobius<long double>> gens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "genus") {
      if (!(ls >> genus) || genus < 2) throw ParseError(path + ":" + std::to_string(lineno) + ": bad genus");
      continue;
    }
    if (genus < 2) throw ParseError(path + ": genus line must come first");
    if (tag == "dirichlet_radius") {
      if (!(ls >> m.dirichlet_radius) || !(m.dirichlet_radius > 0))
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad radius");
      continue;
    }
    if (tag == "basis_relator") {
      Word r;
      int t;
      while (ls >> t) {
        if (t == 0 || std::abs(t) > 2 * genus) throw ParseError(path + ":" + std::to_string(lineno) + ": bad basis index");
        r.letters.push_back(Letter::make(std::abs(t) - 1, t < 0));
      }
      m.basis_group.emplace(genus, r);
      continue;
    }
    if (tag == "basis") {
      std::string rest;
      std::getline(ls, rest);
      Word b = free_reduce(parse_word(rest, genus));
      if (b.empty()) throw ParseError(path + ":" + std::to_string(lineno) + ": empty basis word");
      m.basis.push_back(std::move(b));
      continue;
    }
    Word w = parse_word(tag, genus);
    if (w.size() != 1 || w.letters[0].inverted()) throw ParseError(path + ":" + std::to_string(lineno) + ": expected a generator name");
    std::string e[4];
    Mobius<long double> M;
    for (int k = 0; k < 4; ++k) {
      if (!(ls >> e[k])) throw ParseError(path + ":" + std::to_string(lineno) + ": expected four entries");
      M(k / 2, k % 2) = std::strtold(e[k].c_str(), nullptr);
    }
    gens[w.letters[0].index()] = M;
  }
  if (genus < 2 || static_cast<int>(gens.size()) != 2 * genus) throw ParseError(path + ": missing generators");

  m.name = path;
  m.group = SurfaceGroup(genus);
  for (auto& [i, M] : gens) {
    if (std::abs(static_cast<double>(M.determinant()) - 1.0) > 1e-9)
      throw InvariantViolation(path + ": generator with determinant != 1");
    m.gens.push_back(M);
    Mobius<long double> Minv;
    Minv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
    m.inv.push_back(Minv);
  }
  if (!is_plus_minus_identity(word_to_matrix<long double>(m, m.group.relator()), 1e-9))
    throw InvariantViolation(path + ": commutator relation fails");
  if (m.basis.empty()) {
    for (int i = 0; i < 2 * genus; ++i) m.basis.push_back(Word{{Letter::make(i, false)}, true});
  } else if (static_cast<int>(m.basis.size()) != 2 * genus) {
    throw ParseError(path + ": need exactly 2g basis words");
  }
  if (m.basis_group) {
    Mat R = Mat::Identity();
    for (Letter x : m.basis_group->relator().letters) R = (R * basis_matrix(m, x)).eval();
    if (!is_plus_minus_identity(R, 1e-9)) throw InvariantViolation(path + ": basis relator is not trivial");
  }
  if (m.dirichlet_radius > 0) {
    // the side pairings move the centre by at most twice the circumradius
    for (int i = 0; i < 2 * genus; ++i) {
      Mat B = basis_matrix(m, Letter::make(i, false));
      double cosh_d = static_cast<double>(B.squaredNorm()) / 2;
      if (std::acosh(cosh_d) > 2 * m.dirichlet_radius + 1e-9)
        throw InvariantViolation(path + ": basis element moves the centre too far for the stated radius");
    }
  }
  for (const auto& w : reduced_words_up_to(genus, 4)) {
    if (w.empty()) continue;
    long double t = std::abs(word_to_matrix<long double>(m, w).trace());
    if (!(t > 2 + kHyperbolicSlack))
      throw NotHyperbolic(path + ": short word " + to_string(w) + " is not hyperbolic");
  }
  return m;
}

Mobius<long double> basis_matrix(const FuchsianModel& m, Letter x) {
  const Word& w = m.basis.at(x.index());
  return word_to_matrix<long double>(m, x.inverted() ? inverse(w) : w);
}

FuchsianModel builtin_model(const std::string& name) {
  if (name != "bolza") throw ParseError("unknown built-in model '" + name + "' (available: bolza)");
  FuchsianModel m = load_model(data_dir() + "/bolza_genus2.txt");
  m.name = "bolza";
  return m;
}

LengthSpectrum LengthSpectrum::truncated(double L) const {
  LengthSpectrum t = *this;
  t.classes.clear();
  for (const auto& c : classes)
    if (c.length < L) t.classes.push_back(c);
  return t;
}

namespace {

// Lyndon words (aperiodic least rotations) of a fixed length over the
// enumeration basis, restricted to cyclically freely reduced words.
// Fredricksen-Kessler-Maiorana recursion with prefix matrix products.
class LyndonWalk {
 public:
  LyndonWalk(const FuchsianModel& m, int n, double L_max) : n_(n), k_(m.group.num_letters()) {
    a_.assign(n + 1, 0);
    run_.assign(n + 1, 1);
    piece_.assign(n + 1, {});
    prefix_.assign(n + 1, Mobius<double>::Identity());
    for (int c = 0; c < k_; ++c) mats_.push_back(basis_matrix(m, Letter{static_cast<std::uint8_t>(c)}).cast<double>());
    if (m.basis_group) pieces_ = &*m.basis_group;
    if (m.dirichlet_radius > 0) max_norm2_ = 2 * std::cosh(L_max + 2 * m.dirichlet_radius) * (1 + 1e-9);
  }

  template <typename Visit>
  void run(Visit&& visit) {
    gen(1, 1, visit);
  }

  // prefixes of full length that survived pruning (Lyndon or not)
  long long survivors() const { return survivors_; }

 private:
  template <typename Visit>
  void gen(int t, int p, Visit& visit) {
    if (t > n_) {
      ++survivors_;
      if (p == n_ && a_[n_] != (a_[1] ^ 1)) visit(a_, prefix_[n_].trace());
      return;
    }
    extend(t, a_[t - p], p, visit);
    for (int j = a_[t - p] + 1; j < k_; ++j) extend(t, j, t, visit);
  }

  template <typename Visit>
  void extend(int t, int j, int p, Visit& visit) {
    if (t > 1) {
      if (j == (a_[t - 1] ^ 1)) return;
      if (pieces_ && !track_piece(t, j)) return;
    }
    a_[t] = j;
    prefix_[t].noalias() = prefix_[t - 1] * mats_[j];
    // |P|_F^2 = 2 cosh d(i, P i)
    if (prefix_[t].squaredNorm() > max_norm2_) return;
    gen(t + 1, p, visit);
  }

  // false if letter j extends a run along the basis relator past half its length
  bool track_piece(int t, int j) {
    auto pc = pieces_->locate(Letter{static_cast<std::uint8_t>(a_[t - 1])}, Letter{static_cast<std::uint8_t>(j)});
    if (pc.cycle < 0) {
      run_[t] = 1;
    } else {
      const auto& prev = piece_[t - 1];
      bool continues = run_[t - 1] >= 2 && prev.cycle == pc.cycle && (prev.pos + 1) % k_ == pc.pos;
      run_[t] = continues ? run_[t - 1] + 1 : 2;
      if (2 * run_[t] > k_) return false;
    }
    piece_[t] = pc;
    return true;
  }

  int n_, k_;
  const SurfaceGroup* pieces_ = nullptr;
  double max_norm2_ = INFINITY;
  long long survivors_ = 0;
  std::vector<int> a_, run_;
  std::vector<SurfaceGroup::Piece> piece_;
  std::vector<Mobius<double>> prefix_;
  std::vector<Mobius<double>> mats_;
};

// basis word (codes) -> word in the standard generators
Word expand_basis_word(const FuchsianModel& m, const std::vector<int>& a, int n) {
  Word w;
  for (int i = 1; i <= n; ++i) {
    Letter x{static_cast<std::uint8_t>(a[i])};
    const Word& sub = m.basis[x.index()];
    if (x.inverted()) {
      Word inv = inverse(sub);
      w.letters.insert(w.letters.end(), inv.letters.begin(), inv.letters.end());
    } else {
      w.letters.insert(w.letters.end(), sub.letters.begin(), sub.letters.end());
    }
  }
  return free_reduce(w);
}

bool is_periodic(const std::vector<Letter>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = (w[i] == w[i - p]);
    if (periodic) return true;
  }
  return false;
}

// Sign-normalized so that M and -M (same element of PSL2) compare equal.
Mat normalize_sign(Mat M) {
  long double s = M(0, 0) + M(1, 1);
  if (s < 0 || (s == 0 && M(0, 1) < 0)) M = -M;
  return M;
}

// All conjugates c M c^{-1} for short c, sorted for lookup.
class ConjugateSet {
 public:
  ConjugateSet(const std::vector<std::pair<Mat, Mat>>& conjugators, const Mat& M) {
    for (const auto& [C, Cinv] : conjugators) items_.push_back(normalize_sign(C * M * Cinv));
    std::sort(items_.begin(), items_.end(), [](const Mat& x, const Mat& y) { return x(0, 0) < y(0, 0); });
  }

  bool contains(const Mat& target) const {
    Mat T = normalize_sign(target);
    long double scale = std::max<long double>(1, T.cwiseAbs().maxCoeff());
    long double tol = 1e-7L * scale;
    auto lo = std::lower_bound(items_.begin(), items_.end(), T(0, 0) - tol,
                               [](const Mat& x, long double v) { return x(0, 0) < v; });
    for (auto it = lo; it != items_.end() && (*it)(0, 0) <= T(0, 0) + tol; ++it)
      if ((*it - T).cwiseAbs().maxCoeff() <= tol) return true;
    return false;
  }

 private:
  std::vector<Mat> items_;
};

// Matrices of every cyclic rotation of w and of w^{-1}.
std::vector<Mat> rotation_matrices(const FuchsianModel& m, const Word& w) {
  std::vector<Mat> out;
  Word inv = inverse(w);
  for (const Word* base : std::initializer_list<const Word*>{&w, &inv}) {
    const std::size_t n = base->size();
    for (std::size_t r = 0; r < n; ++r) {
      Word rot;
      for (std::size_t k = 0; k < n; ++k) rot.letters.push_back(base->letters[(r + k) % n]);
      out.push_back(word_to_matrix<long double>(m, rot));
    }
  }
  return out;
}

long long length_sort_key(double l) { return std::llround(l * 1e9); }

void sort_classes(std::vector<PrimitiveGeodesic>& v) {
  std::sort(v.begin(), v.end(), [](const PrimitiveGeodesic& x, const PrimitiveGeodesic& y) {
    auto kx = length_sort_key(x.length), ky = length_sort_key(y.length);
    if (kx != ky) return kx < ky;
    return x.key < y.key;
  });
}

}  // namespace

LengthSpectrum enumerate_spectrum(const FuchsianModel& m, double L_max, const EnumerationOptions& opt,
                                  EnumerationStats* stats_out) {
  EnumerationStats stats;
  const SurfaceGroup& G = m.group;
  std::map<std::vector<Letter>, PrimitiveGeodesic> found;

  // returns the number of new classes found at basis word length n
  auto visit_length = [&](int n) {
    long long fresh = 0;
    LyndonWalk walk(m, n, L_max);
    walk.run([&](const std::vector<int>& a, double trace) {
      ++stats.lyndon_words;
      double t = std::abs(trace);
      if (t <= 2 + kHyperbolicSlack) {
        Word w = expand_basis_word(m, a, n);
        if (G.dehn_reduce_cyclic(w.letters).empty()) return;
        throw NotHyperbolic("word " + to_string(w) + " has |trace| " + std::to_string(t));
      }
      if (length_from_trace(t) > L_max + 1e-9) return;
      ++stats.candidates;
      ConjClassKey key = canonical_class(expand_basis_word(m, a, n), G);
      if (is_periodic(key.cyclic_word.letters)) return;
      if (found.count(key.cyclic_word.letters)) return;
      PrimitiveGeodesic pg;
      long double tr = word_to_matrix<long double>(m, key.cyclic_word).trace();
      pg.trace = static_cast<double>(tr);
      pg.length = static_cast<double>(length_from_trace(tr));
      pg.word_length = static_cast<int>(key.cyclic_word.size());
      pg.key = std::move(key);
      if (pg.length > L_max) return;
      ++fresh;
      found.emplace(pg.key.cyclic_word.letters, std::move(pg));
    });
    stats.new_classes_by_word_length.resize(n + 1, 0);
    stats.new_classes_by_word_length[n] = fresh;
    if (walk.survivors() == 0) stats.exhausted = true;
    return fresh;
  };

  int W = 0;
  if (opt.horizon > 0) {
    W = opt.horizon;
    for (int n = 1; n <= W && !stats.exhausted; ++n) visit_length(n);
  } else {
    // Stop once two consecutive word lengths bring no new class below the cutoff.
    int quiet = 0;
    for (int n = 1; quiet < 2 && !stats.exhausted; ++n) {
      if (n > opt.max_horizon)
        throw HorizonTooSmall("no quiet horizon up to word length " + std::to_string(opt.max_horizon));
      quiet = visit_length(n) == 0 ? quiet + 1 : 0;
      W = n;
    }
  }

  std::vector<PrimitiveGeodesic> classes;
  for (auto& [k, pg] : found) classes.push_back(std::move(pg));
  sort_classes(classes);

  if (opt.merge_conjugates && !classes.empty()) {
    std::vector<std::pair<Mat, Mat>> conj;
    for (const auto& c : reduced_words_up_to(G.genus(), 4))
      conj.emplace_back(word_to_matrix<long double>(m, c), word_to_matrix<long double>(m, inverse(c)));

    std::vector<char> keep(classes.size(), 1);
    // equal-length runs: keep one representative per conjugacy class
    for (std::size_t i = 0; i < classes.size();) {
      std::size_t j = i + 1;
      while (j < classes.size() && std::abs(classes[j].length - classes[i].length) <= 1e-8 * std::max(1.0, classes[i].length)) ++j;
      std::vector<std::pair<std::size_t, ConjugateSet>> reps;
      for (std::size_t a = i; a < j; ++a) {
        auto rots = rotation_matrices(m, classes[a].key.cyclic_word);
        bool dup = false;
        for (const auto& [r, set] : reps) {
          for (const auto& R : rots)
            if (set.contains(R)) {
              dup = true;
              break;
            }
          if (dup) break;
        }
        if (dup) {
          keep[a] = 0;
          ++stats.merged_conjugates;
        } else {
          reps.emplace_back(a, ConjugateSet(conj, word_to_matrix<long double>(m, classes[a].key.cyclic_word)));
        }
      }
      i = j;
    }
    // hidden proper powers: l = q * l_delta and conjugate to delta^q
    for (std::size_t a = 0; a < classes.size(); ++a) {
      if (!keep[a]) continue;
      for (int q = 2; classes[a].length / q >= classes.front().length - 1e-8; ++q) {
        double target = classes[a].length / q;
        for (std::size_t d = 0; d < a; ++d) {
          if (!keep[d] || std::abs(classes[d].length - target) > 1e-8 * std::max(1.0, target)) continue;
          Mat D = word_to_matrix<long double>(m, classes[d].key.cyclic_word), Dq = Mat::Identity();
          for (int e = 0; e < q; ++e) Dq = (Dq * D).eval();
          ConjugateSet set(conj, Dq);
          for (const auto& R : rotation_matrices(m, classes[a].key.cyclic_word))
            if (set.contains(R)) {
              keep[a] = 0;
              ++stats.dropped_powers;
              break;
            }
          if (!keep[a]) break;
        }
        if (!keep[a]) break;
      }
    }
    std::vector<PrimitiveGeodesic> kept;
    for (std::size_t a = 0; a < classes.size(); ++a)
      if (keep[a]) kept.push_back(std::move(classes[a]));
    classes = std::move(kept);
  }

  if (classes.empty() && !opt.allow_empty)
    throw HorizonTooSmall("no primitive class with length <= " + std::to_string(L_max));

  LengthSpectrum s;
  s.cutoff = L_max;
  s.genus = G.genus();
  s.horizon_word_length = W;
  s.has_words = true;
  s.model = m.name;
  s.classes = std::move(classes);
  if (stats_out) *stats_out = std::move(stats);
  return s;
}

std::string compare_spectra(const LengthSpectrum& a, const LengthSpectrum& b, double L) {
  auto below = [L](const LengthSpectrum& s) {
    std::vector<const PrimitiveGeodesic*> v;
    for (const auto& c : s.classes)
      if (c.length <= L) v.push_back(&c);
    return v;
  };
  auto va = below(a), vb = below(b);
  if (va.size() != vb.size())
    return "class counts differ: " + std::to_string(va.size()) + " vs " + std::to_string(vb.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (!(va[i]->key == vb[i]->key) || std::abs(va[i]->length - vb[i]->length) > 1e-9)
      return "class " + std::to_string(i) + " differs: " + to_string(va[i]->key.cyclic_word) + " vs " +
             to_string(vb[i]->key.cyclic_word);
  }
  return {};
}

static void check_cutoff(const LengthSpectrum& s, double T) {
  if (T > s.cutoff + 1e-12)
    throw CutoffExceeded("T = " + std::to_string(T) + " exceeds spectrum cutoff " + std::to_string(s.cutoff));
}

double counting_N0(const LengthSpectrum& s, double T) {
  check_cutoff(s, T);
  double n = 0;
  for (const auto& c : s.classes)
    if (c.length <= T) n += 2;
  return n;
}

double counting_N(const LengthSpectrum& s, double T) {
  check_cutoff(s, T);
  double n = 0;
  for (const auto& c : s.classes) n += 2 * std::floor(T / c.length);
  return n;
}

double counting_Nchi(const LengthSpectrum& s, double T, const Character& chi) {
  check_cutoff(s, T);
  bool trivial = std::all_of(chi.values.begin(), chi.values.end(), [](auto z) { return z == std::complex<double>(1.0); });
  if (!s.has_words && !trivial) throw WordsAbsent("twisted count needs word representatives");
  double n = 0;
  for (const auto& c : s.classes) {
    std::complex<double> z = trivial ? 1.0 : char_eval(chi, c.key.cyclic_word), zk = 1.0;
    for (int k = 1; k * c.length <= T; ++k) {
      zk *= z;
      n += 2 * zk.real();
    }
  }
  return n;
}

void save_spectrum(const LengthSpectrum& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.cutoff);
  out << "# cutoff=" << buf << " genus=" << s.genus << " horizon=" << s.horizon_word_length;
  if (!s.model.empty()) out << " model=" << s.model;
  out << "\nword,length,trace\n";
  for (const auto& c : s.classes) {
    out << (s.has_words ? to_string(c.key.cyclic_word) : std::string()) << ',';
    std::snprintf(buf, sizeof buf, "%.12g", c.length);
    out << buf << ',';
    if (c.trace != 0) {
      std::snprintf(buf, sizeof buf, "%.17g", c.trace);
      out << buf;
    }
    out << '\n';
  }
}

LengthSpectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file " + path);
  LengthSpectrum s;
  s.cutoff = -1;
  std::string line;
  int lineno = 0;
  bool header = false;
  int with_words = 0, without_words = 0;
  std::set<std::vector<Letter>> keys;
  std::unique_ptr<SurfaceGroup> G;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = [&] { return path + ":" + std::to_string(lineno) + ": "; };
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
        try {
          if (k == "cutoff") s.cutoff = std::stod(v);
          else if (k == "genus") s.genus = std::stoi(v);
          else if (k == "horizon") s.horizon_word_length = std::stoi(v);
          else if (k == "model") s.model = v;
        } catch (const std::exception&) {
          throw ParseError(where() + "bad metadata '" + kv + "'");
        }
      }
      continue;
    }
    if (!header) {
      if (line != "word,length,trace") throw ParseError(where() + "expected header word,length,trace");
      header = true;
      continue;
    }
    auto c1 = line.find(','), c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw ParseError(where() + "expected three fields");
    std::string wtext = line.substr(0, c1), ltext = line.substr(c1 + 1, c2 - c1 - 1), ttext = line.substr(c2 + 1);
    PrimitiveGeodesic pg;
    char* end = nullptr;
    pg.length = std::strtod(ltext.c_str(), &end);
    if (ltext.empty() || *end) throw ParseError(where() + "bad length '" + ltext + "'");
    if (!ttext.empty()) {
      pg.trace = std::strtod(ttext.c_str(), &end);
      if (*end) throw ParseError(where() + "bad trace '" + ttext + "'");
      if (std::abs(pg.trace) <= 2 + kHyperbolicSlack) throw InvariantViolation(where() + "non-hyperbolic trace");
      double from_trace = length_from_trace(pg.trace);
      if (std::abs(from_trace - pg.length) > 1e-9 * std::max(1.0, pg.length))
        throw InvariantViolation(where() + "length does not match trace");
      pg.length = from_trace;  // the trace carries full precision
    }
    if (!(pg.length > 0)) throw InvariantViolation(where() + "length must be positive");
    bool blank = wtext.find_first_not_of(" \t") == std::string::npos;
    if (blank) {
      ++without_words;
    } else {
      ++with_words;
      if (!G) G = std::make_unique<SurfaceGroup>(s.genus);
      Word w = parse_word(wtext, s.genus);
      ConjClassKey key = canonical_class(w, *G);
      if (!(key.cyclic_word == w)) throw InvariantViolation(where() + "word is not a canonical class key");
      if (primitive_root(key, *G).q != 1) throw InvariantViolation(where() + "class is not primitive");
      if (!keys.insert(key.cyclic_word.letters).second) throw InvariantViolation(where() + "duplicate class");
      pg.key = key;
      pg.word_length = static_cast<int>(w.size());
    }
    s.classes.push_back(std::move(pg));
  }
  if (!header) throw ParseError(path + ": missing header");
  if (with_words && without_words) throw InvariantViolation(path + ": mixes rows with and without words");
  s.has_words = without_words == 0;
  double maxlen = 0;
  for (const auto& c : s.classes) maxlen = std::max(maxlen, c.length);
  if (s.cutoff < 0) s.cutoff = maxlen;
  if (maxlen > s.cutoff + 1e-9) throw InvariantViolation(path + ": length above the declared cutoff");
  sort_classes(s.classes);
  return s;
}

}  // namespace covstat
