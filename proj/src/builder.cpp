#include "era/builder.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

namespace era {

build_report build_index(const std::filesystem::path& input,
                         const std::filesystem::path& output, const alphabet& ab,
                         const build_options& opt) {
  auto t0 = std::chrono::steady_clock::now();

  build_report rep;
  rep.budget = split_budget(opt.memory_budget, ab, opt.node_size, opt.r_size, opt.block_size);
  rep.cap = compute_capacity(rep.budget.mts, opt.node_size);
  rep.workers_used = opt.workers ? opt.workers
                                 : std::max(1u, std::thread::hardware_concurrency());
  rep.skip_seek = opt.skip_seek.value_or(rep.workers_used == 1);

  std::uint64_t n_plus_1 = 0;
  bool sentinel_on_disk = false;
  scan_stats master_io;
  {
    memory_ledger master_ledger;
    text_reader reader =
        text_reader::open_file(input, ab, rep.budget.bs_size, &master_ledger);
    n_plus_1 = reader.size();
    sentinel_on_disk = reader.sentinel_on_disk();

    auto entries = discover_prefixes(reader, ab, rep.cap.f_m, {opt.warn_depth});
    if (opt.group) {
      rep.groups = group_prefixes(std::move(entries), rep.cap.f_m);
    } else {
      // one group per prefix, in the order grouping would have seen them
      std::stable_sort(entries.begin(), entries.end(),
                       [](const prefix_entry& a, const prefix_entry& b) {
                         return a.frequency > b.frequency;
                       });
      for (auto& e : entries) rep.groups.push_back(virtual_tree{{std::move(e)}});
    }
    master_io = reader.stats();
    rep.peak_tracked_bytes = master_ledger.peak();
  }
  rep.n_plus_1 = n_plus_1;

  index_meta meta;
  meta.n_plus_1 = n_plus_1;
  meta.base_symbols = std::string(ab.base_symbols());
  meta.sentinel = ab.sentinel();
  meta.text_path = input.string();

  top_trie trie;
  std::uint64_t record_id = 0;
  for (const auto& g : rep.groups)
    for (const auto& m : g.members)
      trie.entries.push_back({m.prefix, record_id++, m.frequency});
  std::sort(trie.entries.begin(), trie.entries.end(),
            [&](const trie_entry& a, const trie_entry& b) {
              return ab.compare(a.prefix, b.prefix) < 0;
            });

  parallel_options popts;
  popts.budget = rep.budget;
  popts.cap = rep.cap;
  popts.skip_seek = rep.skip_seek;
  popts.fixed_range = opt.fixed_range;
  popts.trace = opt.trace;

  auto par = run_parallel(input, ab, n_plus_1, sentinel_on_disk, rep.groups,
                          rep.workers_used, popts, meta, trie, output);

  rep.workers = std::move(par.workers);
  rep.io_total = master_io;
  for (const auto& w : rep.workers) {
    rep.io_total += w.io;
    rep.peak_tracked_bytes = std::max(rep.peak_tracked_bytes, w.peak_tracked_bytes);
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

}  // namespace era
