#include "era/alphabet.hpp"

#include <algorithm>

namespace era {

alphabet::alphabet(std::string_view base_symbols, symbol sentinel)
    : base_(base_symbols), sentinel_(sentinel) {
  rank_.fill(-1);
  int r = 0;
  for (char c : base_) {
    symbol s = static_cast<symbol>(c);
    if (rank_[s] >= 0)
      raise(errc::invalid_symbol, "duplicate base symbol 0x" + to_hex(s));
    rank_[s] = r++;
  }
  if (rank_[sentinel_] >= 0)
    raise(errc::invalid_symbol, "sentinel collides with a base symbol");
  rank_[sentinel_] = r;  // strictly greatest
}

alphabet alphabet::dna(symbol sentinel) { return alphabet("ACGT", sentinel); }

alphabet alphabet::protein(symbol sentinel) {
  return alphabet("ACDEFGHIKLMNPQRSTVWY", sentinel);
}

alphabet alphabet::printable_ascii(symbol sentinel) {
  std::string base;
  for (int c = 0x20; c <= 0x7e; ++c)
    if (static_cast<symbol>(c) != sentinel) base.push_back(static_cast<char>(c));
  return alphabet(base, sentinel);
}

int alphabet::compare(std::string_view a, std::string_view b) const {
  std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i) {
    int ra = rank(static_cast<symbol>(a[i]));
    int rb = rank(static_cast<symbol>(b[i]));
    if (ra != rb) return ra < rb ? -1 : 1;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

std::string alphabet::to_hex(symbol s) {
  static const char* digits = "0123456789abcdef";
  return std::string{digits[s >> 4], digits[s & 0xf]};
}

}  // namespace era
