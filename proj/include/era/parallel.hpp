#ifndef ERA_PARALLEL_HPP
#define ERA_PARALLEL_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "era/index_format.hpp"
#include "era/memory_budget.hpp"
#include "era/vertical_partition.hpp"

namespace era {

// Deterministic assignment of virtual trees to workers: groups ordered by
// descending frequency sum and dealt round-robin, so worker loads stay
// balanced beyond raw group counts.
struct schedule {
  std::vector<std::vector<std::uint32_t>> assignments;  // worker -> group ids
};

schedule make_schedule(std::span<const virtual_tree> groups, unsigned workers);

struct worker_report {
  unsigned worker = 0;
  scan_stats io;
  std::uint64_t peak_tracked_bytes = 0;
  std::uint64_t groups_built = 0;
};

struct parallel_options {
  memory_budget budget;  // per worker
  capacity cap;
  bool skip_seek = false;
  std::uint64_t fixed_range = 0;
  bool trace = false;  // dump preparation iterations to stderr
};

struct parallel_result {
  std::vector<worker_report> workers;
  std::uint64_t master_peak_bytes = 0;
};

// Builds every group with `workers` independent threads and writes the
// final index. Workers share nothing but their initial assignment and the
// files they hand back; output bytes do not depend on the worker count.
parallel_result run_parallel(const std::filesystem::path& text_path, const alphabet& ab,
                             std::uint64_t n_plus_1, bool sentinel_on_disk,
                             std::span<const virtual_tree> groups, unsigned workers,
                             const parallel_options& opts, const index_meta& meta,
                             const top_trie& trie, const std::filesystem::path& output);

}  // namespace era

#endif  // ERA_PARALLEL_HPP
