#ifndef ERA_INDEX_FORMAT_HPP
#define ERA_INDEX_FORMAT_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "era/alphabet.hpp"
#include "era/subtree.hpp"
#include "era/text_reader.hpp"

namespace era {

inline constexpr char kIndexMagic[4] = {'E', 'R', 'A', '1'};
inline constexpr std::uint32_t kFormatVersion = 1;

struct trie_entry {
  std::string prefix;
  std::uint64_t record_id = 0;
  std::uint64_t frequency = 0;
};

// Small in-memory trie over the partition prefixes; entries are kept
// sorted in the alphabet order so that walking them left to right yields
// sub-trees in lexicographic position.
struct top_trie {
  std::vector<trie_entry> entries;
  std::uint64_t total_frequency() const {
    std::uint64_t s = 0;
    for (const auto& e : entries) s += e.frequency;
    return s;
  }
};

struct index_meta {
  std::uint64_t n_plus_1 = 0;
  std::string base_symbols;
  symbol sentinel = '$';
  std::string text_path;  // where the indexed text lived at build time
  std::uint64_t group_count = 0;
};

// Appends the binary payload of one sub-tree section (prefix, node count,
// then pre-order node records).
void serialize_subtree(const subtree& tree, std::string& out);
// Same payload streamed through a small buffer; returns the byte count.
std::uint64_t serialize_subtree_stream(const subtree& tree, std::ostream& out);
subtree deserialize_subtree(std::string_view payload);

// Writes a whole index from in-memory parts. Byte-deterministic.
void write_index(const std::filesystem::path& path, const index_meta& meta,
                 const top_trie& trie, std::span<const subtree> trees);

// Streaming variant: sub-tree section payloads already sit concatenated in
// staging files; each part names its byte start and the section lengths.
struct section_source {
  std::filesystem::path file;
  std::uint64_t offset = 0;
  std::vector<std::uint64_t> lengths;
};
void write_index_from_files(const std::filesystem::path& path, const index_meta& meta,
                            const top_trie& trie, std::span<const section_source> parts);

// Read-side handle. Opening verifies magic, version, the section table
// and every section checksum; sub-trees are deserialized on demand.
class index_reader {
 public:
  static index_reader open(const std::filesystem::path& path);

  const index_meta& meta() const noexcept { return meta_; }
  const top_trie& trie() const noexcept { return trie_; }
  const alphabet& ab() const noexcept { return *ab_; }
  std::size_t subtree_count() const noexcept { return sections_.size() - 1; }

  subtree load_subtree(std::uint64_t record_id) const;

  // Exact substring search; edge label content is read from the text.
  // Returns ascending occurrence positions.
  std::vector<std::uint64_t> find(std::string_view pattern, text_reader& text) const;

  // All n+1 suffix offsets in lexicographic order.
  void enumerate_suffixes(const std::function<void(std::uint64_t)>& fn) const;
  std::vector<std::uint64_t> enumerate_suffixes() const;

  // Stitches the top trie and all sub-trees into one suffix tree
  // (test-scale; loads everything).
  subtree assemble_full_tree() const;

  // Opens the text recorded at build time (or an override).
  text_reader open_text(std::size_t block_size = 1 << 20,
                        const std::optional<std::filesystem::path>& override_path = {}) const;

 private:
  struct section {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    std::uint32_t crc = 0;
  };

  std::string read_section(std::uint64_t id) const;

  std::filesystem::path path_;
  index_meta meta_;
  std::optional<alphabet> ab_;
  std::vector<section> sections_;
  top_trie trie_;
  std::unordered_map<std::string, std::uint32_t> exact_;  // prefix -> entry idx
};

std::uint32_t crc32(std::string_view data, std::uint32_t seed = 0);

}  // namespace era

#endif  // ERA_INDEX_FORMAT_HPP
