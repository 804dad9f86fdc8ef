#ifndef ERA_BUILDER_HPP
#define ERA_BUILDER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "era/parallel.hpp"
#include "era/vertical_partition.hpp"

namespace era {

struct build_options {
  std::uint64_t memory_budget = 256ull << 20;  // per worker, bytes
  std::uint64_t node_size = sizeof(subtree::node);
  std::uint64_t r_size = 0;      // 0: pick by alphabet, capped at budget/8
  std::uint64_t block_size = 1 << 20;
  unsigned workers = 1;          // 0: all hardware threads
  std::optional<bool> skip_seek; // default: enabled only for a single worker
  std::uint64_t fixed_range = 0; // nonzero disables the elastic range
  bool group = true;             // false: every prefix builds alone
  std::size_t warn_depth = 256;
  bool trace = false;            // dump preparation iterations to stderr
};

struct build_report {
  std::uint64_t n_plus_1 = 0;
  capacity cap;
  memory_budget budget;
  unsigned workers_used = 1;
  bool skip_seek = false;
  std::vector<virtual_tree> groups;
  scan_stats io_total;  // master scans plus all workers
  std::vector<worker_report> workers;
  std::uint64_t peak_tracked_bytes = 0;
  double wall_ms = 0.0;
};

// Full pipeline: validate the text, derive the prefix partition and the
// virtual trees from the per-worker budget, build everything with the
// requested workers and write the index to `output`.
build_report build_index(const std::filesystem::path& input,
                         const std::filesystem::path& output, const alphabet& ab,
                         const build_options& opt = {});

}  // namespace era

#endif  // ERA_BUILDER_HPP
