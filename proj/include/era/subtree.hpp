#ifndef ERA_SUBTREE_HPP
#define ERA_SUBTREE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "era/alphabet.hpp"

namespace era {

// Half-open span [start, end) into the text. Edges never store symbol
// payloads, only positions; label content is read back from the text.
struct edge_label {
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::uint64_t length() const noexcept { return end - start; }
  bool operator==(const edge_label&) const = default;
};

// Branching triplet between two lexicographically adjacent leaves:
// their suffixes agree on the first `offset` symbols (measured from the
// suffix start, so offset includes the sub-tree prefix) and then diverge
// with symbols c1 < c2.
struct branch_record {
  symbol c1 = 0;
  symbol c2 = 0;
  std::uint64_t offset = 0;
  bool operator==(const branch_record&) const = default;
};

// Suffix sub-tree over the suffixes sharing one S-prefix. Nodes live in an
// append-only arena with first-child / next-sibling links; children are
// linked in ascending symbol order, so a pre-order walk visits leaves in
// lexicographic suffix order. Node 0 is the root and carries no label.
class subtree {
 public:
  static constexpr std::uint32_t npos = 0xffffffffu;
  static constexpr std::uint64_t not_a_leaf = ~0ull;

  struct node {
    edge_label label;
    std::uint32_t first_child = npos;
    std::uint32_t next_sibling = npos;
    std::uint64_t leaf_offset = not_a_leaf;
  };

  explicit subtree(std::string prefix = "") : prefix_(std::move(prefix)) {
    nodes_.push_back(node{});  // root
  }

  const std::string& prefix() const noexcept { return prefix_; }
  std::uint32_t root() const noexcept { return 0; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_count_; }
  const node& at(std::uint32_t id) const { return nodes_[id]; }

  bool is_leaf(std::uint32_t id) const { return nodes_[id].leaf_offset != not_a_leaf; }

  std::uint32_t child_count(std::uint32_t id) const {
    std::uint32_t n = 0;
    for (std::uint32_t c = nodes_[id].first_child; c != npos; c = nodes_[c].next_sibling) ++n;
    return n;
  }

  void reserve(std::size_t n) { nodes_.reserve(n); }

  // Appends a detached node; the caller wires it up via link_* below.
  std::uint32_t add_node(edge_label label, std::uint64_t leaf_offset = not_a_leaf) {
    nodes_.push_back(node{label, npos, npos, leaf_offset});
    if (leaf_offset != not_a_leaf) ++leaf_count_;
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  void link_first_child(std::uint32_t parent, std::uint32_t child) {
    nodes_[parent].first_child = child;
  }
  void link_next_sibling(std::uint32_t before, std::uint32_t after) {
    nodes_[before].next_sibling = after;
  }
  void set_label(std::uint32_t id, edge_label label) { nodes_[id].label = label; }

  // Pre-order walk. Calls f(node_id, depth_in_symbols_of_parent) where the
  // depth is the path-label length above the node's own edge.
  template <class F>
  void visit_preorder(F&& f) const {
    struct frame {
      std::uint32_t id;
      std::uint64_t parent_depth;
    };
    std::vector<frame> stack;
    stack.push_back({0, 0});
    while (!stack.empty()) {
      frame fr = stack.back();
      stack.pop_back();
      f(fr.id, fr.parent_depth);
      std::uint64_t depth = fr.parent_depth + nodes_[fr.id].label.length();
      // push children in reverse so the first child is visited first
      std::vector<std::uint32_t> kids;
      for (std::uint32_t c = nodes_[fr.id].first_child; c != npos; c = nodes_[c].next_sibling)
        kids.push_back(c);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({*it, depth});
    }
  }

  // Leaf suffix offsets in pre-order (= lexicographic order for a valid tree).
  std::vector<std::uint64_t> leaf_offsets() const;

 private:
  std::string prefix_;
  std::vector<node> nodes_;
  std::size_t leaf_count_ = 0;
};

struct violation {
  std::string what;
  std::uint32_t node = subtree::npos;
};

struct validate_options {
  // Full validation spells every leaf path and checks the suffix-tree edge
  // properties against the text; structural mode checks only shape, label
  // bounds, child ordering and leaf counts.
  bool full = true;
  // Optional precomputed lexicographic suffix order of the text (all n+1
  // offsets); avoids re-sorting when validating many sub-trees of one text.
  const std::vector<std::uint64_t>* suffix_order = nullptr;
};

// Checks every sub-tree invariant plus, in full mode, leaf label spelling
// and the three suffix-tree edge properties (unique leaf path labels,
// forced continuation inside multi-symbol labels, branch symbols occurring
// in the text). Violations are reported, never thrown.
std::vector<violation> validate_subtree(const subtree& tree, std::string_view text,
                                        const alphabet& ab, const validate_options& opt = {});

// Sorts all suffix offsets of `text` (which must end with the sentinel)
// lexicographically under the alphabet rank order.
std::vector<std::uint64_t> sort_suffixes(std::string_view text, const alphabet& ab);

}  // namespace era

#endif  // ERA_SUBTREE_HPP
