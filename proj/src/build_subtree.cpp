#include "era/build_subtree.hpp"

#include <algorithm>
#include <cassert>
#include <memory>

namespace era {

subtree build_subtree(std::span<const std::uint64_t> leaves,
                      std::span<const branch_record> branches, std::uint64_t n_plus_1,
                      std::string prefix, const alphabet& ab) {
  if (leaves.empty()) raise(errc::precondition, "a sub-tree needs at least one leaf");
  if (branches.size() + 1 != leaves.size())
    raise(errc::invalid_branch, "expected one branch record between adjacent leaves");
  const std::uint64_t plen = prefix.size();

  subtree t(std::move(prefix));
  t.reserve(2 * leaves.size());

  std::uint32_t first = t.add_node({leaves[0], n_plus_1}, leaves[0]);
  t.link_first_child(t.root(), first);

  std::vector<std::uint32_t> stack{first};  // rightmost path, root excluded
  std::uint64_t depth = n_plus_1 - leaves[0];

  auto relink_parent = [&](std::uint32_t parent, std::uint32_t from, std::uint32_t to) {
    if (t.at(parent).first_child == from) {
      t.link_first_child(parent, to);
      return;
    }
    for (std::uint32_t c = t.at(parent).first_child; c != subtree::npos;
         c = t.at(c).next_sibling) {
      if (t.at(c).next_sibling == from) {
        t.link_next_sibling(c, to);
        return;
      }
    }
    assert(false && "split edge not found under its parent");
  };

  for (std::size_t k = 0; k < branches.size(); ++k) {
    const branch_record& br = branches[k];
    const std::uint64_t leaf_pos = leaves[k + 1];
    if (br.offset < plen)
      raise(errc::invalid_branch, "branch offset " + std::to_string(br.offset) +
                                      " above the prefix depth");
    if (ab.rank(br.c1) >= ab.rank(br.c2))
      raise(errc::invalid_branch, "branch symbols out of order");
    if (leaf_pos + br.offset >= n_plus_1)
      raise(errc::invalid_branch, "branch offset beyond the suffix");

    std::uint32_t popped;
    do {
      if (stack.empty())
        raise(errc::invalid_branch, "branch offsets do not descend a common path");
      popped = stack.back();
      stack.pop_back();
      depth -= t.at(popped).label.length();
    } while (depth > br.offset);

    std::uint32_t leaf = t.add_node({leaf_pos + br.offset, n_plus_1}, leaf_pos);
    if (depth == br.offset) {
      // branch point already exists: the popped edge's source node
      t.link_next_sibling(popped, leaf);
    } else {
      // branch point sits inside the popped edge: split its label
      std::uint64_t cut = br.offset - depth;
      edge_label lab = t.at(popped).label;
      if (cut >= lab.length())
        raise(errc::invalid_branch, "branch offset slips past an edge label");
      std::uint32_t mid = t.add_node({lab.start, lab.start + cut});
      std::uint32_t parent = stack.empty() ? t.root() : stack.back();
      relink_parent(parent, popped, mid);
      t.set_label(popped, {lab.start + cut, lab.end});
      t.link_first_child(mid, popped);
      t.link_next_sibling(mid, subtree::npos);
      t.link_next_sibling(popped, leaf);
      stack.push_back(mid);
      depth += cut;
    }
    stack.push_back(leaf);
    depth += t.at(leaf).label.length();
    assert(depth == n_plus_1 - leaf_pos);
  }
  return t;
}

virtual_build_result build_virtual_tree(text_reader& reader, const virtual_tree& group,
                                        std::vector<std::vector<std::uint64_t>> occurrences,
                                        const virtual_build_options& opts) {
  if (occurrences.size() != group.members.size())
    raise(errc::precondition, "one occurrence list per group member expected");
  if (opts.f_m && group.total_frequency() > opts.f_m)
    raise(errc::precondition, "group frequency sum exceeds the capacity");

  const std::size_t n = group.members.size();
  prepare_options popts;
  popts.r_capacity = opts.r_capacity;
  popts.fixed_range = opts.fixed_range;
  popts.skip_blocks = opts.skip_blocks;
  popts.ledger = opts.ledger;

  std::vector<std::unique_ptr<prepare_session>> sessions;
  sessions.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    prepare_options po = popts;
    if (opts.trace)
      po.trace = [m, &opts](const prep_snapshot& s) { opts.trace(m, s); };
    sessions.push_back(std::make_unique<prepare_session>(
        reader, group.members[m].prefix, std::move(occurrences[m]), po));
    if (sessions.back()->size() != group.members[m].frequency)
      raise(errc::inconsistent_occurrences,
            "occurrence count disagrees with the recorded frequency of '" +
                group.members[m].prefix + "'");
  }

  struct tagged_request {
    read_request req;
    std::uint32_t member;
    std::uint32_t slot;
  };

  virtual_build_result out;
  std::vector<tagged_request> tagged;
  std::vector<read_request> requests;
  std::vector<std::uint32_t> member_slots;  // scratch per member

  while (true) {
    std::uint64_t total_active = 0;
    for (const auto& s : sessions)
      if (!s->finished()) total_active += s->active_count();
    if (total_active == 0) break;

    tagged.clear();
    for (std::size_t m = 0; m < n; ++m) {
      auto& s = *sessions[m];
      if (s.finished()) continue;
      // proportional share of the look-ahead buffer
      std::uint64_t share = opts.r_capacity * s.active_count() / total_active;
      std::uint64_t range = s.plan_range(share);
      requests.clear();
      member_slots.clear();
      s.begin_iteration(range, requests, member_slots);
      for (std::size_t k = 0; k < requests.size(); ++k)
        tagged.push_back({requests[k], static_cast<std::uint32_t>(m), member_slots[k]});
    }
    std::sort(tagged.begin(), tagged.end(), [](const tagged_request& a, const tagged_request& b) {
      if (a.req.pos != b.req.pos) return a.req.pos < b.req.pos;
      return a.member < b.member;
    });

    requests.clear();
    for (const auto& tr : tagged) requests.push_back(tr.req);
    auto payloads = reader.gather_ranges(requests, opts.skip_blocks);
    for (std::size_t k = 0; k < tagged.size(); ++k)
      sessions[tagged[k].member]->deliver(tagged[k].slot, std::move(payloads[k]));

    for (auto& s : sessions)
      if (!s->finished()) s->finish_iteration();
    ++out.fill_passes;
  }

  out.prepared.reserve(n);
  out.trees.reserve(n);
  for (std::size_t m = 0; m < n; ++m)
    out.prepared.push_back(sessions[m]->take_result());
  sessions.clear();
  for (std::size_t m = 0; m < n; ++m) {
    const auto& pr = out.prepared[m];
    if (opts.ledger)
      opts.ledger->charge(mem_region::tree, 2 * pr.leaves.size() * sizeof(subtree::node));
    out.trees.push_back(build_subtree(pr.leaves, pr.branches, reader.size(),
                                      group.members[m].prefix, reader.ab()));
  }
  return out;
}

}  // namespace era
