#include "era/vertical_partition.hpp"

#include <algorithm>
#include <array>
#include <iostream>
#include <unordered_map>

namespace era {

capacity compute_capacity(std::uint64_t mts, std::uint64_t node_size) {
  if (node_size == 0) raise(errc::precondition, "node size must be positive");
  if (mts < 2 * node_size)
    raise(errc::budget_too_small, "tree area of " + std::to_string(mts) +
                                      " bytes holds no tree at node size " +
                                      std::to_string(node_size));
  return capacity{mts, node_size, mts / (2 * node_size)};
}

namespace {

// Emits every text position with a window of up to `len` symbols (shorter
// near the end). Windows spanning block boundaries are stitched through a
// small carry buffer.
template <class F>
void scan_windows(text_reader& reader, std::size_t len, F&& fn) {
  std::string work;
  std::uint64_t work_base = 0;  // text position of work[0]
  reader.for_each_block([&](std::uint64_t offset, std::string_view block) {
    if (work.empty()) work_base = offset;
    work.append(block);
    // emit all positions whose full window fits in `work`
    std::uint64_t limit = work.size() >= len ? work.size() - len + 1 : 0;
    std::uint64_t i = 0;
    for (; i < limit; ++i)
      fn(work_base + i, std::string_view(work.data() + i, len));
    work.erase(0, i);
    work_base += i;
  });
  // tail windows, shorter than len
  for (std::size_t i = 0; i < work.size(); ++i)
    fn(work_base + i, std::string_view(work.data() + i, work.size() - i));
}

std::uint64_t pack_key(std::string_view s) {
  std::uint64_t k = 0;
  for (char c : s) k = (k << 8) | static_cast<unsigned char>(c);
  return k;
}

// One counting round over candidates of equal length.
std::vector<std::uint64_t> count_candidates(text_reader& reader,
                                            const std::vector<std::string>& candidates,
                                            std::size_t len) {
  std::vector<std::uint64_t> counts(candidates.size(), 0);
  std::array<bool, 256> first_byte{};
  for (const auto& c : candidates) first_byte[static_cast<unsigned char>(c[0])] = true;

  const bool packed = len <= 8;
  std::unordered_map<std::uint64_t, std::uint32_t> pmap;
  std::unordered_map<std::string, std::uint32_t> smap;
  if (packed) {
    pmap.reserve(candidates.size() * 2);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      pmap.emplace(pack_key(candidates[i]), static_cast<std::uint32_t>(i));
  } else {
    smap.reserve(candidates.size() * 2);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      smap.emplace(candidates[i], static_cast<std::uint32_t>(i));
  }

  scan_windows(reader, len, [&](std::uint64_t, std::string_view w) {
    if (w.size() < len) return;
    if (!first_byte[static_cast<unsigned char>(w[0])]) return;
    if (packed) {
      auto it = pmap.find(pack_key(w));
      if (it != pmap.end()) ++counts[it->second];
    } else {
      auto it = smap.find(std::string(w));
      if (it != smap.end()) ++counts[it->second];
    }
  });
  return counts;
}

}  // namespace

std::vector<prefix_entry> discover_prefixes(text_reader& reader, const alphabet& ab,
                                            std::uint64_t f_m, const discover_options& opt) {
  if (f_m == 0) raise(errc::precondition, "frequency cap must be at least 1");

  std::string symbols(ab.base_symbols());
  symbols.push_back(static_cast<char>(ab.sentinel()));

  std::vector<std::string> working;
  for (char s : symbols) working.emplace_back(1, s);

  std::vector<prefix_entry> out;
  bool warned = false;
  std::size_t len = 1;
  while (!working.empty()) {
    if (!warned && len > opt.warn_depth) {
      std::cerr << "warning: prefix extension passed depth " << opt.warn_depth
                << "; the text has very long repeats relative to the memory budget\n";
      warned = true;
    }
    auto counts = count_candidates(reader, working, len);
    std::vector<std::string> next;
    for (std::size_t i = 0; i < working.size(); ++i) {
      if (counts[i] == 0) continue;
      if (counts[i] <= f_m) {
        out.push_back({std::move(working[i]), counts[i]});
      } else {
        for (char s : symbols) next.push_back(working[i] + s);
      }
    }
    working = std::move(next);
    ++len;
  }

  std::sort(out.begin(), out.end(), [&](const prefix_entry& a, const prefix_entry& b) {
    return ab.compare(a.prefix, b.prefix) < 0;
  });
  return out;
}

std::vector<virtual_tree> group_prefixes(std::vector<prefix_entry> entries,
                                         std::uint64_t f_m) {
  for (const auto& e : entries)
    if (e.frequency > f_m)
      raise(errc::precondition, "prefix '" + e.prefix + "' exceeds the frequency cap");

  // descending frequency; stable so equal frequencies keep the input
  // (lexicographic) order, which pins the output bytes
  std::stable_sort(entries.begin(), entries.end(),
                   [](const prefix_entry& a, const prefix_entry& b) {
                     return a.frequency > b.frequency;
                   });

  std::vector<virtual_tree> groups;
  std::vector<bool> used(entries.size(), false);
  for (std::size_t head = 0; head < entries.size(); ++head) {
    if (used[head]) continue;
    virtual_tree g;
    std::uint64_t sum = entries[head].frequency;
    g.members.push_back(std::move(entries[head]));
    used[head] = true;
    for (std::size_t i = head + 1; i < entries.size(); ++i) {
      if (used[i]) continue;
      if (sum + entries[i].frequency <= f_m) {
        sum += entries[i].frequency;
        g.members.push_back(std::move(entries[i]));
        used[i] = true;
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<std::vector<std::uint64_t>> locate_occurrences(
    text_reader& reader, std::span<const std::string> prefixes) {
  std::vector<std::vector<std::uint64_t>> out(prefixes.size());
  if (prefixes.empty()) return out;

  std::size_t maxlen = 0;
  std::array<std::vector<std::uint32_t>, 256> by_first;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (prefixes[i].empty()) raise(errc::precondition, "empty prefix");
    maxlen = std::max(maxlen, prefixes[i].size());
    by_first[static_cast<unsigned char>(prefixes[i][0])].push_back(
        static_cast<std::uint32_t>(i));
  }

  scan_windows(reader, maxlen, [&](std::uint64_t pos, std::string_view w) {
    const auto& cands = by_first[static_cast<unsigned char>(w[0])];
    for (std::uint32_t id : cands) {
      const std::string& p = prefixes[id];
      if (w.size() >= p.size() && std::memcmp(w.data(), p.data(), p.size()) == 0) {
        out[id].push_back(pos);
        break;  // prefix-free: nothing else can match here
      }
    }
  });
  return out;
}

}  // namespace era
