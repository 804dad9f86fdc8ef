#ifndef ERA_ALPHABET_HPP
#define ERA_ALPHABET_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "era/error.hpp"

namespace era {

using symbol = unsigned char;

// Ordered symbol set plus a terminal sentinel. The total order is the given
// base-symbol order with the sentinel strictly greatest, so the sentinel
// cannot be a proper prefix tie-breaker: a suffix that runs into the
// terminal sorts after every longer suffix sharing its prefix.
class alphabet {
 public:
  alphabet(std::string_view base_symbols, symbol sentinel = '$');

  static alphabet dna(symbol sentinel = '$');      // {A,C,G,T}
  static alphabet protein(symbol sentinel = '$');  // 20 standard residues
  static alphabet printable_ascii(symbol sentinel = '$');

  std::string_view base_symbols() const noexcept { return base_; }
  symbol sentinel() const noexcept { return sentinel_; }
  // base symbols + sentinel
  std::size_t size() const noexcept { return base_.size() + 1; }

  bool contains(symbol s) const noexcept { return rank_[s] >= 0; }

  // Rank in the total order; the sentinel gets the greatest rank.
  // Throws errc::invalid_symbol for symbols outside the alphabet.
  int rank(symbol s) const {
    int r = rank_[s];
    if (r < 0)
      raise(errc::invalid_symbol,
            "symbol 0x" + to_hex(s) + " is not in the alphabet");
    return r;
  }

  bool less(symbol a, symbol b) const { return rank(a) < rank(b); }

  // Lexicographic comparison of two symbol sequences under the rank order.
  // A proper prefix sorts before its extensions.
  int compare(std::string_view a, std::string_view b) const;

 private:
  static std::string to_hex(symbol s);

  std::string base_;
  symbol sentinel_;
  std::array<int, 256> rank_;
};

inline int symbol_rank(const alphabet& a, symbol s) { return a.rank(s); }

}  // namespace era

#endif  // ERA_ALPHABET_HPP
