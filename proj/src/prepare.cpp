#include "era/prepare.hpp"

#include <algorithm>
#include <cassert>

namespace era {

prepare_session::prepare_session(text_reader& reader, std::string prefix,
                                 std::vector<std::uint64_t> occurrences,
                                 const prepare_options& opts)
    : reader_(&reader), prefix_(std::move(prefix)), opts_(opts) {
  if (occurrences.empty())
    raise(errc::inconsistent_occurrences, "prefix '" + prefix_ + "' has no occurrences");

  std::string probe;
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    if (i > 0 && occurrences[i] <= occurrences[i - 1])
      raise(errc::inconsistent_occurrences, "occurrence positions must be strictly ascending");
    if (occurrences[i] >= reader.size())
      raise(errc::inconsistent_occurrences,
            "occurrence position " + std::to_string(occurrences[i]) + " beyond text end");
    reader.read_range_into(occurrences[i], prefix_.size(), probe);
    if (probe != prefix_)
      raise(errc::inconsistent_occurrences,
            "position " + std::to_string(occurrences[i]) + " does not spell the prefix");
  }

  const std::size_t f = occurrences.size();
  leaves_ = std::move(occurrences);
  slot_of_occ_.resize(f);
  occ_of_slot_.resize(f);
  for (std::size_t i = 0; i < f; ++i) slot_of_occ_[i] = occ_of_slot_[i] = i;
  area_.assign(f, 0);
  reads_.resize(f);
  branch_.resize(f);
  branch_defined_.assign(f + 1, 0);
  branch_defined_[0] = branch_defined_[f] = 1;
  depth_ = prefix_.size();
  active_ = f;
  undefined_branches_ = f - 1;

  charge(mem_region::tree, 20 * f);  // occurrence-order index, area tags, slot order
  tree_charged_ = 20 * f;
  std::uint64_t proc = sizeof(branch_record) * f + (f + 1);
  charge(mem_region::processing, proc);
  processing_charged_ = proc;

  if (f == 1) {  // a single leaf needs no refinement
    area_[0] = kDoneArea;
    slot_of_occ_[0] = kDone;
    active_ = 0;
  }
}

prepare_session::~prepare_session() {
  release(mem_region::tree, tree_charged_);
  release(mem_region::processing, processing_charged_);
  release(mem_region::r_buffer, reads_bytes_);
}

void prepare_session::charge(mem_region r, std::uint64_t bytes) {
  if (opts_.ledger) opts_.ledger->charge(r, bytes);
}
void prepare_session::release(mem_region r, std::uint64_t bytes) {
  if (opts_.ledger) opts_.ledger->release(r, bytes);
}

std::uint64_t prepare_session::plan_range(std::uint64_t r_share) const {
  if (opts_.fixed_range) return opts_.fixed_range;
  return elastic_range(r_share, active_);
}

void prepare_session::begin_iteration(std::uint64_t range, std::vector<read_request>& requests,
                                      std::vector<std::uint32_t>& slots) {
  assert(!finished());
  range_ = range;
  ranges_used_.push_back(range);
  ++iteration_;

  const std::size_t f = leaves_.size();
  for (std::size_t s = 0; s < f; ++s) {
    if (area_[s] == kDoneArea && !reads_[s].empty()) {
      release(mem_region::r_buffer, reads_[s].size());
      reads_bytes_ -= reads_[s].size();
      std::string().swap(reads_[s]);
    }
  }
  // requests in occurrence (string) order: positions come out ascending
  for (std::size_t occ = 0; occ < f; ++occ) {
    std::uint64_t s = slot_of_occ_[occ];
    if (s == kDone) continue;
    requests.push_back({leaves_[s] + depth_, range_});
    slots.push_back(static_cast<std::uint32_t>(s));
  }
}

void prepare_session::deliver(std::uint32_t slot, std::string&& payload) {
  release(mem_region::r_buffer, reads_[slot].size());
  reads_bytes_ -= reads_[slot].size();
  reads_[slot] = std::move(payload);
  charge(mem_region::r_buffer, reads_[slot].size());
  reads_bytes_ += reads_[slot].size();
}

void prepare_session::sort_area(std::size_t lo, std::size_t hi) {
  const alphabet& ab = reader_->ab();
  std::vector<std::uint32_t> idx(hi - lo);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(lo + i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ab.compare(reads_[a], reads_[b]) < 0;
  });

  std::vector<std::string> tmp_reads(idx.size());
  std::vector<std::uint64_t> tmp_leaves(idx.size());
  std::vector<std::uint64_t> tmp_occ(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    tmp_reads[i] = std::move(reads_[idx[i]]);
    tmp_leaves[i] = leaves_[idx[i]];
    tmp_occ[i] = occ_of_slot_[idx[i]];
  }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    reads_[lo + i] = std::move(tmp_reads[i]);
    leaves_[lo + i] = tmp_leaves[i];
    occ_of_slot_[lo + i] = tmp_occ[i];
    slot_of_occ_[tmp_occ[i]] = lo + i;
  }

  // equal reads are still unresolved: open a fresh area per tie run;
  // singleton runs retire through the branch rule below
  std::size_t t = lo;
  while (t < hi) {
    std::size_t u = t + 1;
    while (u < hi && reads_[u] == reads_[t]) ++u;
    if (u - t >= 2) {
      std::uint32_t id = next_area_++;
      for (std::size_t w = t; w < u; ++w) area_[w] = id;
    }
    t = u;
  }
}

void prepare_session::finish_iteration() {
  const std::size_t f = leaves_.size();

  std::size_t i = 0;
  while (i < f) {
    if (area_[i] == kDoneArea) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < f && area_[j] == area_[i]) ++j;
    sort_area(i, j);
    i = j;
  }

  for (std::size_t s = 1; s < f; ++s) {
    if (branch_defined_[s]) continue;
    const std::string& a = reads_[s - 1];
    const std::string& b = reads_[s];
    std::size_t m = std::min(a.size(), b.size());
    std::size_t cs = 0;
    while (cs < m && a[cs] == b[cs]) ++cs;
    if (cs >= range_) continue;  // still tied over the whole window
    if (cs >= a.size() || cs >= b.size())
      raise(errc::precondition,
            "adjacent reads exhausted while equal; the text lacks a unique sentinel");
    branch_[s] = branch_record{static_cast<symbol>(a[cs]), static_cast<symbol>(b[cs]),
                               depth_ + cs};
    branch_defined_[s] = 1;
    --undefined_branches_;
  }

  // a slot is complete exactly when both neighbouring records exist
  for (std::size_t s = 0; s < f; ++s) {
    if (area_[s] == kDoneArea) continue;
    if (branch_defined_[s] && branch_defined_[s + 1]) {
      area_[s] = kDoneArea;
      slot_of_occ_[occ_of_slot_[s]] = kDone;
      --active_;
    }
  }

  if (opts_.trace) opts_.trace(snapshot());
  depth_ += range_;
}

prep_snapshot prepare_session::snapshot() const {
  const std::size_t f = leaves_.size();
  prep_snapshot s;
  s.iteration = iteration_;
  s.depth = depth_;
  s.width = range_;
  s.leaves = leaves_;
  s.reads = reads_;
  s.occurrence_of_slot = occ_of_slot_;
  s.branches.resize(f);
  for (std::size_t i = 1; i < f; ++i)
    if (branch_defined_[i]) s.branches[i] = branch_[i];
  s.slot_of_occurrence.resize(f);
  for (std::size_t i = 0; i < f; ++i)
    if (slot_of_occ_[i] != kDone) s.slot_of_occurrence[i] = slot_of_occ_[i];
  s.area.resize(f);
  for (std::size_t i = 0; i < f; ++i)
    if (area_[i] != kDoneArea) s.area[i] = area_[i];
  return s;
}

prepare_result prepare_session::take_result() {
  assert(finished());
  const std::size_t f = leaves_.size();

  for (std::size_t s = 0; s < f; ++s) {
    if (!reads_[s].empty()) {
      release(mem_region::r_buffer, reads_[s].size());
      reads_bytes_ -= reads_[s].size();
      std::string().swap(reads_[s]);
    }
  }
  // the occurrence-order arrays are no longer needed; the tree area they
  // borrowed is handed back before any sub-tree is materialized
  slot_of_occ_.clear();
  slot_of_occ_.shrink_to_fit();
  occ_of_slot_.clear();
  occ_of_slot_.shrink_to_fit();
  area_.clear();
  area_.shrink_to_fit();
  release(mem_region::tree, tree_charged_);
  tree_charged_ = 0;

  prepare_result r;
  r.leaves = std::move(leaves_);
  r.branches.assign(branch_.begin() + 1, branch_.end());
  r.fill_passes = iteration_;
  r.ranges_used = ranges_used_;
  branch_.clear();
  branch_.shrink_to_fit();
  release(mem_region::processing, processing_charged_);
  processing_charged_ = 0;
  // the compacted branch vector now belongs to the caller, who releases it
  if (opts_.ledger)
    opts_.ledger->charge(mem_region::processing, sizeof(branch_record) * r.branches.size());
  return r;
}

prepare_result prepare_subtree(text_reader& reader, std::string_view prefix,
                               std::vector<std::uint64_t> occurrences,
                               const prepare_options& opts) {
  prepare_session session(reader, std::string(prefix), std::move(occurrences), opts);
  std::vector<read_request> requests;
  std::vector<std::uint32_t> slots;
  while (!session.finished()) {
    std::uint64_t range = session.plan_range(opts.r_capacity);
    requests.clear();
    slots.clear();
    session.begin_iteration(range, requests, slots);
    auto payloads = reader.gather_ranges(requests, opts.skip_blocks);
    for (std::size_t k = 0; k < payloads.size(); ++k)
      session.deliver(slots[k], std::move(payloads[k]));
    session.finish_iteration();
  }
  return session.take_result();
}

}  // namespace era
