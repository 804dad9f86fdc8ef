#ifndef ERA_BUILD_SUBTREE_HPP
#define ERA_BUILD_SUBTREE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "era/prepare.hpp"
#include "era/subtree.hpp"
#include "era/text_reader.hpp"
#include "era/vertical_partition.hpp"

namespace era {

// Assembles a sub-tree from sorted leaves and branching records in one
// left-to-right sweep. Only the rightmost path is live, held on a stack;
// nodes are appended, never revisited, so there is no per-leaf traversal.
// Throws errc::invalid_branch for records that cannot describe a tree
// (offset below the prefix length, c1 not before c2, offsets beyond the
// available path).
subtree build_subtree(std::span<const std::uint64_t> leaves,
                      std::span<const branch_record> branches, std::uint64_t n_plus_1,
                      std::string prefix, const alphabet& ab);

struct virtual_build_options {
  std::uint64_t f_m = 0;            // group capacity; 0 disables the check
  std::uint64_t r_capacity = 32ull << 20;
  std::uint64_t fixed_range = 0;
  bool skip_blocks = false;
  memory_ledger* ledger = nullptr;
  // fired per member iteration when set: (member index, state)
  std::function<void(std::size_t, const prep_snapshot&)> trace;
};

struct virtual_build_result {
  std::vector<subtree> trees;                 // one per group member, in order
  std::vector<prepare_result> prepared;       // matching (L, B) pairs
  std::uint64_t fill_passes = 0;              // shared gather passes
};

// Builds every member of a virtual tree with shared scans: each gather
// pass serves the union of all members' active requests, and the
// look-ahead buffer is split between members in proportion to their
// active counts. Members that finish early drop out and their share
// flows to the rest. Output is identical to building members alone.
virtual_build_result build_virtual_tree(text_reader& reader, const virtual_tree& group,
                                        std::vector<std::vector<std::uint64_t>> occurrences,
                                        const virtual_build_options& opts = {});

}  // namespace era

#endif  // ERA_BUILD_SUBTREE_HPP
