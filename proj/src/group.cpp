#include "covstat/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "covstat/errors.hpp"

namespace covstat {

Word concat(const Word& u, const Word& v) {
  Word w;
  w.letters.reserve(u.size() + v.size());
  w.letters.insert(w.letters.end(), u.letters.begin(), u.letters.end());
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  return w;
}

Word inverse(const Word& w) {
  Word r;
  r.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) r.letters.push_back(it->inverse());
  r.reduced = w.reduced;
  return r;
}

Word power(const Word& w, int q) {
  Word base = q < 0 ? inverse(w) : w;
  Word r;
  for (int i = 0; i < std::abs(q); ++i) r = concat(r, base);
  return r;
}

static std::vector<Letter> reduce_letters(const std::vector<Letter>& in) {
  std::vector<Letter> out;
  out.reserve(in.size());
  for (Letter x : in) {
    if (!out.empty() && out.back() == x.inverse())
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

Word free_reduce(const Word& w) {
  Word r;
  r.letters = reduce_letters(w.letters);
  r.reduced = true;
  return r;
}

bool is_freely_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w.letters[i] == w.letters[i - 1].inverse()) return false;
  return true;
}

std::string to_string(Letter x) {
  char c = (x.index() % 2 == 0) ? 'a' : 'b';
  if (x.inverted()) c = static_cast<char>(c - 'a' + 'A');
  return std::string(1, c) + std::to_string(x.index() / 2 + 1);
}

std::string to_string(const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += to_string(w.letters[i]);
  }
  return s;
}

Word parse_word(std::string_view text, int genus) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    if (tok.size() < 2) throw ParseError("bad letter '" + tok + "'");
    char c = tok[0];
    bool inv = (c == 'A' || c == 'B');
    char lower = inv ? static_cast<char>(c - 'A' + 'a') : c;
    if (lower != 'a' && lower != 'b') throw ParseError("bad letter '" + tok + "'");
    int i = 0;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      if (tok[k] < '0' || tok[k] > '9') throw ParseError("bad letter '" + tok + "'");
      i = 10 * i + (tok[k] - '0');
      if (i > 1000) break;
    }
    if (i < 1 || i > genus)
      throw ParseError("generator index out of range in '" + tok + "' for genus " + std::to_string(genus));
    w.letters.push_back(Letter::make(2 * (i - 1) + (lower == 'b' ? 1 : 0), inv));
  }
  w.reduced = is_freely_reduced(w);
  return w;
}

SurfaceGroup::SurfaceGroup(int genus) : genus_(genus) {
  if (genus < 2) throw InvariantViolation("surface group genus must be >= 2");
  for (int i = 0; i < genus; ++i) {
    Letter a = Letter::make(2 * i, false), b = Letter::make(2 * i + 1, false);
    relator_.letters.insert(relator_.letters.end(), {a, b, a.inverse(), b.inverse()});
  }
  build_tables();
}

SurfaceGroup::SurfaceGroup(int genus, const Word& relator) : genus_(genus), relator_(relator) {
  if (genus < 2) throw InvariantViolation("surface group genus must be >= 2");
  if (static_cast<int>(relator.size()) != 4 * genus || !is_freely_reduced(relator))
    throw InvariantViolation("relator must be freely reduced of length 4g");
  for (Letter x : relator.letters)
    if (x.index() >= 2 * genus) throw InvariantViolation("relator letter out of range");
  build_tables();
}

void SurfaceGroup::build_tables() {
  relator_.reduced = true;
  cycles_ = {relator_.letters, inverse(relator_).letters};
  int L = num_letters();
  pair_table_.assign(L * L, Piece{});
  for (int c = 0; c < 2; ++c) {
    for (int pos = 0; pos < L; ++pos) {
      Letter x = cycles_[c][pos], y = cycles_[c][(pos + 1) % L];
      Piece& slot = pair_table_[x.code * L + y.code];
      // Dehn's algorithm below relies on every ordered pair occurring at most once
      if (slot.cycle >= 0) throw InvariantViolation("relator pair occurs twice");
      slot = Piece{c, pos};
    }
  }
}

std::vector<Letter> SurfaceGroup::dehn_reduce_cyclic(std::vector<Letter> w) const {
  const int L = num_letters();
  for (;;) {
    w = reduce_letters(w);
    std::size_t lo = 0, hi = w.size();
    while (hi - lo >= 2 && w[lo] == w[hi - 1].inverse()) ++lo, --hi;
    if (lo > 0) w = std::vector<Letter>(w.begin() + lo, w.begin() + hi);

    const int n = static_cast<int>(w.size());
    if (2 * n <= L) return w;

    bool changed = false;
    for (int i = 0; i < n && !changed; ++i) {
      Piece pc = locate(w[i], w[(i + 1) % n]);
      if (pc.cycle < 0) continue;
      const auto& cyc = cycles_[pc.cycle];
      int m = 2;
      while (m < n && m < L && w[(i + m) % n] == cyc[(pc.pos + m) % L]) ++m;
      if (2 * m <= L) continue;

      // piece * complement = 1, so piece = complement^{-1}
      std::vector<Letter> next;
      next.reserve(n);
      for (int j = L - 1; j >= m; --j) next.push_back(cyc[(pc.pos + j) % L].inverse());
      for (int j = m; j < n; ++j) next.push_back(w[(i + j) % n]);
      w = std::move(next);
      changed = true;
    }
    if (!changed) return w;
  }
}

std::vector<Letter> least_rotation(const std::vector<Letter>& w) {
  const std::size_t n = w.size();
  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      Letter x = w[(r + k) % n], y = w[(best + k) % n];
      if (x == y) continue;
      if (x < y) best = r;
      break;
    }
  }
  std::vector<Letter> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = w[(best + k) % n];
  return out;
}

static std::vector<Letter> inverse_letters(const std::vector<Letter>& w) {
  std::vector<Letter> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[w.size() - 1 - i].inverse();
  return r;
}

namespace {

// Spellings reachable by swapping a half-relator piece for the other half.
// Returns false (and the shorter word) if some swap makes the word shorter.
bool half_swap_closure(const SurfaceGroup& G, const std::vector<Letter>& start,
                       std::set<std::vector<Letter>>& seen, std::vector<Letter>& shorter) {
  const int L = G.num_letters();
  const int half = L / 2;
  std::deque<std::vector<Letter>> todo;
  seen.insert(least_rotation(start));
  todo.push_back(*seen.begin());
  while (!todo.empty()) {
    std::vector<Letter> u = std::move(todo.front());
    todo.pop_front();
    const int n = static_cast<int>(u.size());
    if (n < half) continue;
    for (int i = 0; i < n; ++i) {
      auto pc = G.locate(u[i], u[(i + 1) % n]);
      if (pc.cycle < 0) continue;
      const auto& cyc = G.cycles()[pc.cycle];
      int m = 2;
      while (m < half && u[(i + m) % n] == cyc[(pc.pos + m) % L]) ++m;
      if (m < half) continue;
      std::vector<Letter> v;
      v.reserve(n);
      for (int j = L - 1; j >= half; --j) v.push_back(cyc[(pc.pos + j) % L].inverse());
      for (int j = half; j < n; ++j) v.push_back(u[(i + j) % n]);
      v = G.dehn_reduce_cyclic(std::move(v));
      if (static_cast<int>(v.size()) < n) {
        shorter = std::move(v);
        return false;
      }
      auto r = least_rotation(v);
      if (seen.insert(r).second) todo.push_back(std::move(r));
    }
  }
  return true;
}

}  // namespace

ConjClassKey canonical_class(const Word& w, const SurfaceGroup& group) {
  std::vector<Letter> c = group.dehn_reduce_cyclic(w.letters);
  for (;;) {
    if (c.empty()) throw IdentityWord("word is trivial in the surface group");
    std::set<std::vector<Letter>> seen;
    std::vector<Letter> shorter;
    if (!half_swap_closure(group, c, seen, shorter)) {
      c = std::move(shorter);
      continue;
    }
    std::vector<Letter> best;
    for (const auto& u : seen) {
      auto inv = least_rotation(inverse_letters(u));
      const auto& cand = std::min(u, inv);
      if (best.empty() || cand < best) best = cand;
    }
    ConjClassKey key;
    key.cyclic_word.letters = std::move(best);
    key.cyclic_word.reduced = true;
    key.canonical = true;
    return key;
  }
}

PrimitiveRoot primitive_root(const ConjClassKey& key, const SurfaceGroup& group) {
  const auto& w = key.cyclic_word.letters;
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = (w[i] == w[i - p]);
    if (!periodic) continue;
    Word root;
    root.letters.assign(w.begin(), w.begin() + p);
    return {canonical_class(root, group), static_cast<int>(n / p)};
  }
  return {key, 1};
}

Character::Character(std::vector<std::complex<double>> v) : values(std::move(v)) {
  for (auto z : values)
    if (std::abs(std::abs(z) - 1.0) > 1e-12) throw InvariantViolation("character value off the unit circle");
  squared_trivial = std::all_of(values.begin(), values.end(), [](std::complex<double> z) {
    return std::abs(z.imag()) < 1e-12;
  });
}

Character Character::trivial(int genus) {
  return Character(std::vector<std::complex<double>>(2 * genus, 1.0));
}

Character Character::from_angles(const std::vector<double>& angles) {
  std::vector<std::complex<double>> v;
  for (double t : angles) v.push_back(std::polar(1.0, t));
  // snap exact sign characters so +-1 stays exactly real
  for (auto& z : v)
    if (std::abs(z.imag()) < 1e-14) z = {z.real() > 0 ? 1.0 : -1.0, 0.0};
  return Character(std::move(v));
}

std::complex<double> char_eval(const Character& chi, const Word& w) {
  std::complex<double> z = 1.0;
  for (Letter x : w.letters) {
    auto v = chi.values.at(x.index());
    z *= x.inverted() ? std::conj(v) : v;
  }
  return z;
}

SymmetryClass char_symmetry_class(const Character& chi) {
  return chi.squared_trivial ? SymmetryClass::GOE : SymmetryClass::GUE;
}

const char* to_string(SymmetryClass c) { return c == SymmetryClass::GOE ? "GOE" : "GUE"; }

}  // namespace covstat
