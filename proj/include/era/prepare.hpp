#ifndef ERA_PREPARE_HPP
#define ERA_PREPARE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "era/memory_budget.hpp"
#include "era/subtree.hpp"
#include "era/text_reader.hpp"

namespace era {

// Per-iteration number of symbols to prefetch for every still-active leaf
// slot: the look-ahead buffer divided by the active count, at least one.
// Active counts only shrink, so the range never decreases within a run.
inline std::uint64_t elastic_range(std::uint64_t r_capacity, std::uint64_t active_count) {
  if (active_count == 0)
    raise(errc::precondition, "elastic range queried with no active entries");
  std::uint64_t r = r_capacity / active_count;
  return r == 0 ? 1 : r;
}

// Read-only view of the preparation state after one refinement iteration.
// Slot-indexed vectors run over the leaf slots (lexicographic positions);
// occurrence-indexed ones run over the string order of the occurrences.
struct prep_snapshot {
  std::uint64_t iteration = 0;  // 1-based
  std::uint64_t depth = 0;      // depth the iteration read at
  std::uint64_t width = 0;      // symbols prefetched per active slot
  std::vector<std::uint64_t> leaves;                              // slot -> text position
  std::vector<std::optional<branch_record>> branches;             // [1..|L|-1]
  std::vector<std::optional<std::uint64_t>> slot_of_occurrence;   // nullopt = done
  std::vector<std::optional<std::uint32_t>> area;                 // nullopt = done
  std::vector<std::uint64_t> occurrence_of_slot;
  std::vector<std::string> reads;
};

using trace_hook = std::function<void(const prep_snapshot&)>;

struct prepare_options {
  std::uint64_t r_capacity = 32ull << 20;  // look-ahead symbols available
  std::uint64_t fixed_range = 0;           // nonzero forces a static range
  bool skip_blocks = false;
  trace_hook trace;
  memory_ledger* ledger = nullptr;
};

struct prepare_result {
  std::vector<std::uint64_t> leaves;     // lexicographically sorted
  std::vector<branch_record> branches;   // |leaves| - 1 records
  std::uint64_t fill_passes = 0;
  std::vector<std::uint64_t> ranges_used;
};

// Iterative refinement of one sub-tree's leaf order and branching records.
// Drives itself when used through prepare_subtree; a virtual-tree driver
// runs several sessions in lockstep and feeds them merged gather results.
class prepare_session {
 public:
  // occurrences: exact positions of `prefix` in the text, ascending.
  // Throws errc::inconsistent_occurrences when they do not spell the prefix.
  prepare_session(text_reader& reader, std::string prefix,
                  std::vector<std::uint64_t> occurrences, const prepare_options& opts);
  ~prepare_session();
  prepare_session(const prepare_session&) = delete;
  prepare_session& operator=(const prepare_session&) = delete;

  bool finished() const noexcept { return undefined_branches_ == 0; }
  std::uint64_t active_count() const noexcept { return active_; }
  const std::string& prefix() const noexcept { return prefix_; }
  std::uint64_t size() const noexcept { return leaves_.size(); }

  // Picks the range for the next iteration from a look-ahead share.
  std::uint64_t plan_range(std::uint64_t r_share) const;

  // Releases reads of slots retired last iteration and appends this
  // iteration's requests (ascending positions) plus their target slots.
  void begin_iteration(std::uint64_t range, std::vector<read_request>& requests,
                       std::vector<std::uint32_t>& slots);

  void deliver(std::uint32_t slot, std::string&& payload);

  // Sorts active areas, derives new branch records, retires completed
  // slots and advances the depth. Fires the trace hook.
  void finish_iteration();

  // Valid once finished(); leaves the session empty.
  prepare_result take_result();

 private:
  void charge(mem_region r, std::uint64_t bytes);
  void release(mem_region r, std::uint64_t bytes);
  void sort_area(std::size_t lo, std::size_t hi);
  prep_snapshot snapshot() const;

  static constexpr std::uint64_t kDone = ~0ull;
  static constexpr std::uint32_t kDoneArea = 0xffffffffu;

  text_reader* reader_ = nullptr;
  std::string prefix_;
  prepare_options opts_;

  std::vector<std::uint64_t> leaves_;        // L
  std::vector<branch_record> branch_;        // slot i: record between i-1 and i
  std::vector<std::uint8_t> branch_defined_; // size |L|+1, virtual borders defined
  std::vector<std::uint64_t> slot_of_occ_;   // I
  std::vector<std::uint32_t> area_;          // A
  std::vector<std::uint64_t> occ_of_slot_;   // P
  std::vector<std::string> reads_;           // R

  std::uint64_t depth_ = 0;   // symbols already consumed per suffix
  std::uint64_t range_ = 0;   // current iteration's width
  std::uint32_t next_area_ = 1;
  std::uint64_t active_ = 0;
  std::uint64_t undefined_branches_ = 0;
  std::uint64_t iteration_ = 0;
  std::uint64_t reads_bytes_ = 0;
  std::uint64_t tree_charged_ = 0;
  std::uint64_t processing_charged_ = 0;
  std::vector<std::uint64_t> ranges_used_;
};

// Runs a whole preparation for one S-prefix: every iteration issues one
// gather pass for the active slots, widest range the buffer allows.
prepare_result prepare_subtree(text_reader& reader, std::string_view prefix,
                               std::vector<std::uint64_t> occurrences,
                               const prepare_options& opts = {});

}  // namespace era

#endif  // ERA_PREPARE_HPP
