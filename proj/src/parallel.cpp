#include "era/parallel.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "era/build_subtree.hpp"
#include "era/prepare.hpp"

namespace era {

schedule make_schedule(std::span<const virtual_tree> groups, unsigned workers) {
  if (workers == 0) raise(errc::precondition, "worker count must be at least 1");
  std::vector<std::uint32_t> order(groups.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return groups[a].total_frequency() > groups[b].total_frequency();
  });
  schedule s;
  s.assignments.resize(workers);
  for (std::size_t i = 0; i < order.size(); ++i)
    s.assignments[i % workers].push_back(order[i]);
  return s;
}

namespace {

std::mutex trace_mutex;

void dump_trace(const std::string& prefix, const prep_snapshot& snap) {
  std::lock_guard<std::mutex> lock(trace_mutex);
  auto& os = std::cerr;
  os << "[prepare " << prefix << "] iter " << snap.iteration << " depth " << snap.depth
     << " range " << snap.width << "\n  L:";
  for (auto v : snap.leaves) os << ' ' << v;
  os << "\n  I:";
  for (const auto& v : snap.slot_of_occurrence)
    if (v) os << ' ' << *v; else os << " done";
  os << "\n  A:";
  for (const auto& v : snap.area)
    if (v) os << ' ' << *v; else os << " done";
  os << "\n  P:";
  for (auto v : snap.occurrence_of_slot) os << ' ' << v;
  os << "\n  R:";
  for (const auto& r : snap.reads) os << " '" << r << "'";
  os << "\n  B:";
  for (std::size_t i = 1; i < snap.branches.size(); ++i) {
    if (snap.branches[i])
      os << " (" << snap.branches[i]->c1 << ',' << snap.branches[i]->c2 << ','
         << snap.branches[i]->offset << ')';
    else
      os << " -";
  }
  os << '\n';
}

struct group_payload {
  std::uint64_t file_offset = 0;
  std::vector<std::uint64_t> lengths;  // one per member sub-tree
};

struct worker_task {
  unsigned id;
  const std::filesystem::path* text_path;
  const alphabet* ab;
  std::uint64_t n_plus_1;
  bool sentinel_on_disk;
  std::span<const virtual_tree> groups;
  const std::vector<std::uint32_t>* assigned;
  const parallel_options* opts;
  std::filesystem::path staging_file;

  worker_report report;
  std::vector<std::pair<std::uint32_t, group_payload>> payloads;  // group id -> location
};

void worker_main(worker_task& task) {
  const parallel_options& opts = *task.opts;
  memory_ledger ledger;
  text_reader reader =
      text_reader::reopen(*task.text_path, *task.ab, task.n_plus_1, task.sentinel_on_disk,
                          opts.budget.bs_size, &ledger);
  std::ofstream staging(task.staging_file, std::ios::binary | std::ios::trunc);
  if (!staging) raise(errc::io_failure, "cannot write " + task.staging_file.string());
  std::uint64_t staging_off = 0;

  const auto& assigned = *task.assigned;
  // occurrence lists for a batch of groups are located in one scan, as
  // many as fit comfortably inside the processing area
  const std::uint64_t park_cap = std::max<std::uint64_t>(opts.budget.processing / 3, 4096);

  std::size_t next = 0;
  while (next < assigned.size()) {
    std::size_t batch_end = next;
    std::uint64_t parked = 0;
    std::vector<std::string> prefixes;
    while (batch_end < assigned.size()) {
      std::uint64_t add = 8 * task.groups[assigned[batch_end]].total_frequency();
      if (batch_end > next && parked + add > park_cap) break;
      parked += add;
      for (const auto& m : task.groups[assigned[batch_end]].members)
        prefixes.push_back(m.prefix);
      ++batch_end;
    }

    auto located = locate_occurrences(reader, prefixes);
    for (auto& v : located) v.shrink_to_fit();
    std::uint64_t located_bytes = 0;
    for (const auto& v : located) located_bytes += 8 * v.size();
    ledger.charge(mem_region::processing, located_bytes);

    std::size_t cursor = 0;
    for (std::size_t gi = next; gi < batch_end; ++gi) {
      const virtual_tree& group = task.groups[assigned[gi]];
      std::vector<std::vector<std::uint64_t>> occs;
      occs.reserve(group.members.size());
      for (std::size_t m = 0; m < group.members.size(); ++m)
        occs.push_back(std::move(located[cursor++]));

      virtual_build_options vopts;
      vopts.f_m = opts.cap.f_m;
      vopts.r_capacity = opts.budget.r_size;
      vopts.fixed_range = opts.fixed_range;
      vopts.skip_blocks = opts.skip_seek;
      vopts.ledger = &ledger;
      if (opts.trace)
        vopts.trace = [&group](std::size_t m, const prep_snapshot& s) {
          dump_trace(group.members[m].prefix, s);
        };

      auto built = build_virtual_tree(reader, group, std::move(occs), vopts);

      group_payload payload;
      payload.file_offset = staging_off;
      for (std::size_t m = 0; m < built.trees.size(); ++m) {
        std::uint64_t len = serialize_subtree_stream(built.trees[m], staging);
        payload.lengths.push_back(len);
        staging_off += len;
        std::uint64_t f = built.prepared[m].leaves.size();
        // drop this member's tree and arrays before the next one
        ledger.release(mem_region::tree, 2 * f * sizeof(subtree::node));
        built.trees[m] = subtree("");
        ledger.release(mem_region::processing,
                       8 * f + sizeof(branch_record) * built.prepared[m].branches.size());
        built.prepared[m] = prepare_result{};
      }
      task.payloads.emplace_back(assigned[gi], std::move(payload));
      ++task.report.groups_built;
    }
    next = batch_end;
  }
  staging.flush();
  if (!staging) raise(errc::io_failure, "write failed on " + task.staging_file.string());

  task.report.io = reader.stats();
  task.report.peak_tracked_bytes = ledger.peak();
}

}  // namespace

parallel_result run_parallel(const std::filesystem::path& text_path, const alphabet& ab,
                             std::uint64_t n_plus_1, bool sentinel_on_disk,
                             std::span<const virtual_tree> groups, unsigned workers,
                             const parallel_options& opts, const index_meta& meta,
                             const top_trie& trie, const std::filesystem::path& output) {
  if (!opts.budget.valid()) raise(errc::budget_too_small, "per-worker budget is not viable");
  schedule sched = make_schedule(groups, workers);

  std::vector<worker_task> tasks(workers);
  for (unsigned w = 0; w < workers; ++w) {
    tasks[w].id = w;
    tasks[w].text_path = &text_path;
    tasks[w].ab = &ab;
    tasks[w].n_plus_1 = n_plus_1;
    tasks[w].sentinel_on_disk = sentinel_on_disk;
    tasks[w].groups = groups;
    tasks[w].assigned = &sched.assignments[w];
    tasks[w].opts = &opts;
    tasks[w].staging_file = output;
    tasks[w].staging_file += ".w" + std::to_string(w) + ".tmp";
    tasks[w].report.worker = w;
  }

  std::vector<std::exception_ptr> errors(workers);
  if (workers == 1) {
    worker_main(tasks[0]);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      threads.emplace_back([&tasks, &errors, w] {
        try {
          worker_main(tasks[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : threads) t.join();
  }
  auto cleanup = [&] {
    for (const auto& t : tasks) {
      std::error_code ec;
      std::filesystem::remove(t.staging_file, ec);
    }
  };
  for (unsigned w = 0; w < workers; ++w)
    if (errors[w]) {
      cleanup();
      std::rethrow_exception(errors[w]);
    }

  // stitch the final index in group-id order regardless of which worker
  // built what, so the bytes cannot depend on scheduling
  std::vector<section_source> parts(groups.size());
  for (const auto& t : tasks)
    for (const auto& [gid, payload] : t.payloads)
      parts[gid] = {t.staging_file, payload.file_offset, payload.lengths};

  write_index_from_files(output, meta, trie, parts);
  cleanup();

  parallel_result result;
  for (auto& t : tasks) result.workers.push_back(t.report);
  return result;
}

}  // namespace era
