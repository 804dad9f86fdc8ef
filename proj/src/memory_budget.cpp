#include "era/memory_budget.hpp"

#include <algorithm>

namespace era {

memory_budget split_budget(std::uint64_t total, const alphabet& ab,
                           std::uint64_t node_size, std::uint64_t r_override,
                           std::uint64_t bs_override) {
  memory_budget b;
  b.total = total;
  b.r_size = r_override ? r_override : std::min<std::uint64_t>(default_r_size(ab), total / 8);
  b.bs_size = bs_override
                  ? bs_override
                  : std::min<std::uint64_t>(1ull << 20, std::max<std::uint64_t>(4096, total / 8));
  b.trie_reserve = std::min<std::uint64_t>(1ull << 20, total / 16);
  std::uint64_t fixed = b.r_size + b.bs_size + b.trie_reserve;
  if (b.r_size == 0 || fixed >= total)
    raise(errc::budget_too_small, "memory budget of " + std::to_string(total) +
                                      " bytes cannot host the buffer regions");
  std::uint64_t usable = total - fixed;
  b.mts = usable * 3 / 5;
  b.processing = usable - b.mts;
  if (b.mts < 2 * node_size)
    raise(errc::budget_too_small,
          "sub-tree area of " + std::to_string(b.mts) + " bytes holds no tree (node size " +
              std::to_string(node_size) + ")");
  return b;
}

}  // namespace era
