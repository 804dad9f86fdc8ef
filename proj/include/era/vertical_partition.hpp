#ifndef ERA_VERTICAL_PARTITION_HPP
#define ERA_VERTICAL_PARTITION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "era/alphabet.hpp"
#include "era/text_reader.hpp"

namespace era {

struct prefix_entry {
  std::string prefix;
  std::uint64_t frequency = 0;
};

// Group of S-prefixes whose sub-trees are built together so every scan of
// the text serves all of them.
struct virtual_tree {
  std::vector<prefix_entry> members;
  std::uint64_t total_frequency() const {
    std::uint64_t s = 0;
    for (const auto& m : members) s += m.frequency;
    return s;
  }
};

// Leaf-count cap for one sub-tree: a tree with f leaves occupies
// 2 * f * node_size bytes, so the tree area of mts bytes holds at most
// mts / (2 * node_size) leaves.
struct capacity {
  std::uint64_t mts = 0;
  std::uint64_t node_size = 0;
  std::uint64_t f_m = 0;
};

capacity compute_capacity(std::uint64_t mts, std::uint64_t node_size);

struct discover_options {
  // a warning is emitted (once) when prefixes grow past this length
  std::size_t warn_depth = 256;
};

// Iterated prefix extension: starting from every symbol plus the sentinel,
// each round counts the working set in one sequential scan; prefixes with
// 0 < f <= f_m are emitted, over-full ones are extended by every symbol
// including the sentinel, absent ones are dropped. The result is a
// prefix-free set covering every suffix exactly once, sorted
// lexicographically.
std::vector<prefix_entry> discover_prefixes(text_reader& reader, const alphabet& ab,
                                            std::uint64_t f_m,
                                            const discover_options& opt = {});

// First-fit grouping over the descending-frequency list: open a group with
// the head, then sweep the remainder adding whatever still fits under f_m.
std::vector<virtual_tree> group_prefixes(std::vector<prefix_entry> entries,
                                         std::uint64_t f_m);

// One sequential scan locating every occurrence of every prefix; the
// prefixes must be mutually prefix-free so each text position matches at
// most one of them. Results align with the input order, positions ascending.
std::vector<std::vector<std::uint64_t>> locate_occurrences(
    text_reader& reader, std::span<const std::string> prefixes);

}  // namespace era

#endif  // ERA_VERTICAL_PARTITION_HPP
