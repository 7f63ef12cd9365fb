#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace covstat {

// A generator or its inverse, packed as code = 2*(generator index) + inverted.
// Generators are numbered a1, b1, a2, b2, ... so comparing codes gives the
// order a1 < A1 < b1 < B1 < a2 < ...
struct Letter {
  std::uint8_t code = 0;

  static Letter make(int index, bool inverted) {  // index is 0-based
    return Letter{static_cast<std::uint8_t>(2 * index + (inverted ? 1 : 0))};
  }
  int index() const { return code >> 1; }
  bool inverted() const { return code & 1; }
  Letter inverse() const { return Letter{static_cast<std::uint8_t>(code ^ 1)}; }

  friend bool operator==(Letter x, Letter y) { return x.code == y.code; }
  friend auto operator<=>(Letter x, Letter y) { return x.code <=> y.code; }
};

struct Word {
  std::vector<Letter> letters;
  bool reduced = false;

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  friend bool operator==(const Word& u, const Word& v) { return u.letters == v.letters; }
};

Word concat(const Word& u, const Word& v);
Word inverse(const Word& w);
Word power(const Word& w, int q);
Word free_reduce(const Word& w);
bool is_freely_reduced(const Word& w);

// Text format: "a1 A1 b1 B1", capital letter = inverse. Empty string is the identity.
Word parse_word(std::string_view text, int genus);
std::string to_string(const Word& w);
std::string to_string(Letter x);

class SurfaceGroup {
 public:
  // standard relator [a1,b1]...[ag,bg]
  explicit SurfaceGroup(int genus);
  // any one-relator surface presentation whose relator (length 4g) uses each
  // ordered letter pair at most once, e.g. the vertex cycle of a polygon
  SurfaceGroup(int genus, const Word& relator);

  int genus() const { return genus_; }
  int num_letters() const { return 4 * genus_; }
  const Word& relator() const { return relator_; }

  // Freely and cyclically reduces w, then applies Dehn reductions until no
  // piece longer than half a relator remains. Result is a cyclic word.
  std::vector<Letter> dehn_reduce_cyclic(std::vector<Letter> w) const;

  struct Piece {
    int cycle = -1;  // index into cycles()
    int pos = 0;     // where the pair starts in that cycle
  };
  // Which cyclic rotation of relator^{+-1} contains the adjacent pair (x, y).
  Piece locate(Letter x, Letter y) const {
    return pair_table_[x.code * num_letters() + y.code];
  }
  const std::vector<std::vector<Letter>>& cycles() const { return cycles_; }

 private:
  void build_tables();

  int genus_;
  Word relator_;
  std::vector<std::vector<Letter>> cycles_;  // relator and its inverse
  std::vector<Piece> pair_table_;
};

struct ConjClassKey {
  Word cyclic_word;
  bool canonical = false;

  friend bool operator==(const ConjClassKey& a, const ConjClassKey& b) {
    return a.cyclic_word == b.cyclic_word;
  }
  friend bool operator<(const ConjClassKey& a, const ConjClassKey& b) {
    return a.cyclic_word.letters < b.cyclic_word.letters;
  }
};

// Lexicographically least rotation.
std::vector<Letter> least_rotation(const std::vector<Letter>& w);

ConjClassKey canonical_class(const Word& w, const SurfaceGroup& group);

struct PrimitiveRoot {
  ConjClassKey root;
  int q = 1;
};
PrimitiveRoot primitive_root(const ConjClassKey& key, const SurfaceGroup& group);

enum class SymmetryClass { GOE, GUE };

struct Character {
  std::vector<std::complex<double>> values;  // one per generator a1, b1, a2, ...
  bool squared_trivial = true;

  Character() = default;
  explicit Character(std::vector<std::complex<double>> v);

  static Character trivial(int genus);
  // exp(i*theta_j) per generator
  static Character from_angles(const std::vector<double>& angles);
};

std::complex<double> char_eval(const Character& chi, const Word& w);
SymmetryClass char_symmetry_class(const Character& chi);
const char* to_string(SymmetryClass c);

}  // namespace covstat
