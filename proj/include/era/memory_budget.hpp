#ifndef ERA_MEMORY_BUDGET_HPP
#define ERA_MEMORY_BUDGET_HPP

#include <array>
#include <cstdint>

#include "era/alphabet.hpp"
#include "era/error.hpp"

namespace era {

// Accounting regions for the working memory of one build pipeline.
enum class mem_region : int {
  tree = 0,        // sub-tree arena; also hosts the transient occurrence-order arrays
  processing,      // leaf positions and branch records
  r_buffer,        // prefetched look-ahead symbols
  block_buffer,    // input block buffer
  trie,            // top-level prefix trie
  count_
};

// Tracks logical allocations per region for one worker. Not thread-safe;
// every worker owns its own ledger.
class memory_ledger {
 public:
  void charge(mem_region r, std::uint64_t bytes) {
    current_[static_cast<int>(r)] += bytes;
    total_ += bytes;
    if (total_ > peak_) peak_ = total_;
  }
  void release(mem_region r, std::uint64_t bytes) {
    current_[static_cast<int>(r)] -= bytes;
    total_ -= bytes;
  }
  std::uint64_t current(mem_region r) const { return current_[static_cast<int>(r)]; }
  std::uint64_t current_total() const { return total_; }
  std::uint64_t peak() const { return peak_; }

 private:
  std::array<std::uint64_t, static_cast<int>(mem_region::count_)> current_{};
  std::uint64_t total_ = 0;
  std::uint64_t peak_ = 0;
};

// Split of one worker's memory budget. The processing arrays indexed by
// occurrence order live inside the tree area and are released before the
// sub-tree itself is materialized, so they are not a separate region.
struct memory_budget {
  std::uint64_t total = 0;
  std::uint64_t mts = 0;           // sub-tree area
  std::uint64_t processing = 0;    // leaf positions + branch records
  std::uint64_t r_size = 0;        // look-ahead buffer, in bytes == symbols
  std::uint64_t bs_size = 0;       // input block buffer
  std::uint64_t trie_reserve = 0;

  bool valid() const {
    return mts + processing + r_size + bs_size + trie_reserve <= total && mts > 0 &&
           r_size > 0 && bs_size > 0;
  }
};

// Default look-ahead buffer size by alphabet: small alphabets branch less
// and need less concurrent look-ahead.
inline std::uint64_t default_r_size(const alphabet& ab) {
  return ab.base_symbols().size() <= 8 ? (32ull << 20) : (256ull << 20);
}

// Carves a total per-worker budget into the standard regions. Throws
// errc::budget_too_small when no sensible split exists.
memory_budget split_budget(std::uint64_t total, const alphabet& ab,
                           std::uint64_t node_size, std::uint64_t r_override = 0,
                           std::uint64_t bs_override = 0);

}  // namespace era

#endif  // ERA_MEMORY_BUDGET_HPP
