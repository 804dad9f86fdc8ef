#ifndef ERA_ORACLE_HPP
#define ERA_ORACLE_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "era/alphabet.hpp"
#include "era/subtree.hpp"

// Brute-force reference implementations used to cross-check the real
// construction path. Everything here favours directness over speed and is
// meant for test-scale inputs only.
namespace era::oracle {

struct lb_pair {
  std::vector<std::uint64_t> leaves;
  std::vector<branch_record> branches;
};

// Occurrences of `prefix` ordered by whole-suffix comparison, with branch
// records from direct longest-common-prefix computation.
lb_pair naive_lb(std::string_view text, std::string_view prefix, const alphabet& ab);

// Full suffix tree built by inserting one suffix at a time from the root.
subtree naive_tree(std::string_view text, const alphabet& ab);

// Structural equality: same pre-order shape, same spelled edge labels,
// same leaf offsets. Label index pairs may differ as long as the spelled
// substrings match.
bool trees_equal(const subtree& a, const subtree& b, std::string_view text);

// Verifies the three suffix-tree edge properties by exhaustive occurrence
// tracking: every node carries the set of text positions its path label
// occurs at; leaves must keep exactly one, internal nodes at least two,
// label symbols must never lose an occurrence, and branch symbols must
// partition the parent's set completely.
std::vector<violation> check_proposition1(std::string_view text, const subtree& tree,
                                          const alphabet& ab);

// Deepest branching depth inside the sub-tree of `prefix`: the maximum
// lcp between suffix-sorted adjacent occurrences (at least |prefix|).
// Bounds the number of refinement passes the preparation may take.
std::uint64_t longest_repeat_depth(std::string_view text, std::string_view prefix,
                                   const alphabet& ab);

std::vector<std::uint64_t> find_occurrences(std::string_view text, std::string_view pattern);

}  // namespace era::oracle

#endif  // ERA_ORACLE_HPP
