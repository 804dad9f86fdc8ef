#ifndef ERA_TEXT_READER_HPP
#define ERA_TEXT_READER_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "era/alphabet.hpp"
#include "era/error.hpp"
#include "era/memory_budget.hpp"

namespace era {

struct scan_stats {
  std::uint64_t passes = 0;         // gather passes
  std::uint64_t blocks_read = 0;
  std::uint64_t blocks_skipped = 0;
  std::uint64_t seeks = 0;          // one per skipped block run

  scan_stats& operator+=(const scan_stats& o) {
    passes += o.passes;
    blocks_read += o.blocks_read;
    blocks_skipped += o.blocks_skipped;
    seeks += o.seeks;
    return *this;
  }
};

struct read_request {
  std::uint64_t pos = 0;
  std::uint64_t len = 0;
};

// Block-buffered sequential access to the text. The text is the file
// content plus a terminal sentinel; if the file does not end with the
// sentinel byte a virtual one is appended, so position n always reads the
// sentinel and n+1 counts it. One reader serves one worker; it is not
// shareable between concurrent callers.
class text_reader {
 public:
  // Validates every byte of the file against the alphabet.
  // Throws errc::invalid_symbol (with offset) or errc::duplicate_sentinel.
  static text_reader open_file(const std::filesystem::path& path, const alphabet& ab,
                               std::size_t block_size = 1 << 20,
                               memory_ledger* ledger = nullptr);

  // Same validation over an in-memory buffer (tests and small inputs).
  static text_reader from_memory(std::string bytes, const alphabet& ab,
                                 std::size_t block_size = 1 << 20,
                                 memory_ledger* ledger = nullptr);

  // Re-opens a file already validated by a previous open_file; used by
  // workers to get private readers without re-scanning the input.
  static text_reader reopen(const std::filesystem::path& path, const alphabet& ab,
                            std::uint64_t n_plus_1, bool sentinel_on_disk,
                            std::size_t block_size, memory_ledger* ledger = nullptr);

  text_reader(text_reader&&) noexcept;
  text_reader& operator=(text_reader&&) noexcept;
  text_reader(const text_reader&) = delete;
  text_reader& operator=(const text_reader&) = delete;
  ~text_reader();

  std::uint64_t size() const noexcept { return n_plus_1_; }  // n + 1
  const alphabet& ab() const noexcept { return *ab_; }
  const std::filesystem::path& source() const noexcept { return path_; }
  bool sentinel_on_disk() const noexcept { return sentinel_on_disk_; }
  std::size_t block_size() const noexcept { return block_size_; }

  // Reads min(len, n+1-pos) symbols starting at pos.
  // Throws errc::out_of_range when pos > n.
  std::string read_range(std::uint64_t pos, std::uint64_t len);
  void read_range_into(std::uint64_t pos, std::uint64_t len, std::string& out);

  // Fills every request in one pass over the text with non-decreasing block
  // offsets. Requests must be sorted by pos (non-decreasing). When
  // skip_enabled, maximal block runs containing no requested symbol are
  // skipped with a single seek each; payloads are identical either way.
  std::vector<std::string> gather_ranges(std::span<const read_request> requests,
                                         bool skip_enabled);
  void gather_ranges_into(std::span<const read_request> requests, bool skip_enabled,
                          std::span<std::string> out);

  // One sequential scan over all blocks: fn(text_offset, block_bytes).
  void for_each_block(const std::function<void(std::uint64_t, std::string_view)>& fn);

  const scan_stats& stats() const noexcept { return stats_; }
  void reset_stats() { stats_ = scan_stats{}; }

  // Test hook: when set, every fetched block id of a gather pass is
  // appended, with ~0ull separating passes.
  std::vector<std::uint64_t>* block_trace = nullptr;

 private:
  text_reader() = default;
  void init_ledger(memory_ledger* ledger);
  // Loads block `id` into the buffer (or reuses it) and returns its bytes.
  std::string_view fetch_block(std::uint64_t id);
  std::string_view fetch_block_sequential(std::uint64_t id, bool counted);
  std::uint64_t block_count() const { return (n_plus_1_ + block_size_ - 1) / block_size_; }
  static void validate_bytes(std::string_view chunk, std::uint64_t base_offset,
                             const alphabet& ab, std::uint64_t file_len,
                             bool* saw_final_sentinel);

  const alphabet* ab_ = nullptr;
  std::filesystem::path path_;
  std::ifstream file_;
  bool is_file_ = false;
  std::string memory_;  // in-memory backend (normalized to end with sentinel)
  std::uint64_t n_plus_1_ = 0;
  std::uint64_t disk_len_ = 0;  // bytes of text actually on disk
  bool sentinel_on_disk_ = false;
  std::size_t block_size_ = 0;

  std::string buffer_;
  std::uint64_t buffered_block_ = ~0ull;
  std::uint64_t file_pos_ = ~0ull;  // current read position of file_, in bytes

  scan_stats stats_;
  memory_ledger* ledger_ = nullptr;
};

}  // namespace era

#endif  // ERA_TEXT_READER_HPP
