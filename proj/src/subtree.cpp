#include "era/subtree.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace era {

std::vector<std::uint64_t> subtree::leaf_offsets() const {
  std::vector<std::uint64_t> out;
  out.reserve(leaf_count_);
  visit_preorder([&](std::uint32_t id, std::uint64_t) {
    if (is_leaf(id)) out.push_back(nodes_[id].leaf_offset);
  });
  return out;
}

namespace {

// Rank table that never throws: bytes outside the alphabet sort after
// everything valid, deterministically. Corrupt inputs must produce
// violation reports, not exceptions.
std::array<int, 256> make_rank_table(const alphabet& ab) {
  std::array<int, 256> rk;
  for (int b = 0; b < 256; ++b)
    rk[b] = ab.contains(static_cast<symbol>(b)) ? ab.rank(static_cast<symbol>(b))
                                                : 256 + b;
  return rk;
}

struct suffix_cmp {
  std::string_view text;
  const std::array<int, 256>* rk;
  bool operator()(std::uint64_t a, std::uint64_t b) const {
    std::string_view sa = text.substr(a), sb = text.substr(b);
    std::size_t m = std::min(sa.size(), sb.size());
    for (std::size_t i = 0; i < m; ++i) {
      int ra = (*rk)[static_cast<unsigned char>(sa[i])];
      int rb = (*rk)[static_cast<unsigned char>(sb[i])];
      if (ra != rb) return ra < rb;
    }
    return sa.size() < sb.size();
  }
};

std::size_t count_occurrences(std::string_view text, std::string_view pat) {
  if (pat.empty()) return text.size();
  std::size_t count = 0;
  for (std::size_t i = 0; i + pat.size() <= text.size(); ++i)
    if (std::memcmp(text.data() + i, pat.data(), pat.size()) == 0) ++count;
  return count;
}

}  // namespace

std::vector<std::uint64_t> sort_suffixes(std::string_view text, const alphabet& ab) {
  auto rk = make_rank_table(ab);
  std::vector<std::uint64_t> order(text.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), suffix_cmp{text, &rk});
  return order;
}

namespace {

class validator {
 public:
  validator(const subtree& t, std::string_view text, const alphabet& ab,
            const validate_options& opt)
      : t_(t), text_(text), ab_(ab), opt_(opt), rk_(make_rank_table(ab)) {}

  std::vector<violation> run() {
    if (!check_shape()) return std::move(out_);
    check_labels_and_children();
    check_counts();
    if (opt_.full && out_.empty()) {
      check_leaf_paths();
      check_leaf_order();
      check_edge_properties();
    }
    return std::move(out_);
  }

 private:
  void add(std::string what, std::uint32_t node = subtree::npos) {
    out_.push_back({std::move(what), node});
  }

  int rank_at(std::uint64_t pos) const {
    return rk_[static_cast<unsigned char>(text_[pos])];
  }

  // Reachability walk; bails out early on corrupted links so the later
  // passes can assume a well-formed arena.
  bool check_shape() {
    const std::size_t nc = t_.node_count();
    if (nc == 0 || t_.at(0).label.length() != 0) {
      add("root must exist and carry no label", 0);
      return false;
    }
    if (nc == 1) {
      add("sub-tree has no leaves", 0);
      return false;
    }
    std::vector<std::uint8_t> seen(nc, 0);
    std::vector<std::uint32_t> stack{0};
    std::size_t links = 0;
    while (!stack.empty()) {
      std::uint32_t id = stack.back();
      stack.pop_back();
      if (seen[id]) {
        add("node reachable more than once", id);
        return false;
      }
      seen[id] = 1;
      for (std::uint32_t c = t_.at(id).first_child; c != subtree::npos;
           c = t_.at(c).next_sibling) {
        if (c >= nc || ++links > nc) {
          add("corrupt child links", id);
          return false;
        }
        stack.push_back(c);
      }
    }
    for (std::size_t i = 0; i < nc; ++i)
      if (!seen[i]) {
        add("unreachable node", static_cast<std::uint32_t>(i));
        return false;
      }
    return true;
  }

  void check_labels_and_children() {
    const std::uint64_t n1 = text_.size();
    for (std::uint32_t id = 0; id < t_.node_count(); ++id) {
      const auto& nd = t_.at(id);
      if (id != 0) {
        if (!(nd.label.start < nd.label.end && nd.label.end <= n1)) {
          add("edge label out of bounds", id);
          continue;
        }
      }
      if (t_.is_leaf(id)) {
        if (nd.first_child != subtree::npos) add("leaf with children", id);
        if (nd.leaf_offset >= n1) add("leaf offset out of range", id);
      } else if (id != 0 && t_.child_count(id) < 2) {
        add("unary internal node", id);
      }
      // children: pairwise distinct first symbols, ascending
      int prev_rank = -1;
      for (std::uint32_t c = nd.first_child; c != subtree::npos;
           c = t_.at(c).next_sibling) {
        const auto& cl = t_.at(c).label;
        if (!(cl.start < cl.end && cl.end <= n1)) break;  // reported above
        int r = rank_at(cl.start);
        if (prev_rank >= 0 && r == prev_rank) add("duplicate first symbol", id);
        else if (prev_rank >= 0 && r < prev_rank) add("children out of symbol order", id);
        prev_rank = r;
      }
    }
  }

  void check_counts() {
    std::size_t internal = 0;
    for (std::uint32_t id = 1; id < t_.node_count(); ++id)
      if (!t_.is_leaf(id)) ++internal;
    if (internal > t_.leaf_count()) add("internal node count exceeds leaf count");
    std::size_t freq = count_occurrences(text_, t_.prefix());
    if (t_.leaf_count() != freq)
      add("leaf count " + std::to_string(t_.leaf_count()) +
          " does not match prefix frequency " + std::to_string(freq));
  }

  // Spells out the root-to-leaf label concatenation of every leaf and
  // compares it with the suffix at the leaf's offset.
  void check_leaf_paths() {
    const std::uint64_t n1 = text_.size();
    const std::string& p = t_.prefix();
    struct frame {
      std::uint32_t id;
      std::uint32_t span_count;  // path spans up to and including this node
      std::uint64_t depth;
    };
    std::vector<edge_label> spans;
    std::vector<frame> stack{{0, 0, 0}};
    // iterative DFS that keeps the span path in sync
    while (!stack.empty()) {
      frame fr = stack.back();
      stack.pop_back();
      spans.resize(fr.span_count);
      if (fr.id != 0) {
        spans.push_back(t_.at(fr.id).label);
        fr.depth += t_.at(fr.id).label.length();
      }
      if (t_.is_leaf(fr.id)) {
        std::uint64_t off = t_.at(fr.id).leaf_offset;
        if (fr.depth != n1 - off) {
          add("leaf label mismatch", fr.id);
        } else {
          std::uint64_t d = 0;
          bool ok = true;
          for (const auto& sp : spans) {
            if (std::memcmp(text_.data() + sp.start, text_.data() + off + d,
                            sp.length()) != 0) {
              ok = false;
              break;
            }
            d += sp.length();
          }
          if (!ok) add("leaf label mismatch", fr.id);
          if (off + p.size() > n1 ||
              std::memcmp(text_.data() + off, p.data(), p.size()) != 0)
            add("leaf suffix does not start with the sub-tree prefix", fr.id);
        }
      }
      std::vector<std::uint32_t> kids;
      for (std::uint32_t c = t_.at(fr.id).first_child; c != subtree::npos;
           c = t_.at(c).next_sibling)
        kids.push_back(c);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it)
        stack.push_back({*it, static_cast<std::uint32_t>(spans.size()), fr.depth});
    }
  }

  void check_leaf_order() {
    auto offs = t_.leaf_offsets();
    suffix_cmp cmp{text_, &rk_};
    for (std::size_t i = 1; i < offs.size(); ++i)
      if (!cmp(offs[i - 1], offs[i]))
        add("leaf order violates suffix order at leaf " + std::to_string(i));
  }

  // Edge properties checked against the sorted suffix order: each node is
  // mapped to the range of suffixes sharing its path label.
  void check_edge_properties() {
    std::vector<std::uint64_t> local_order;
    const std::vector<std::uint64_t>* order = opt_.suffix_order;
    if (!order) {
      local_order = sort_suffixes(text_, ab_);
      order = &local_order;
    }
    const std::string& p = t_.prefix();
    // range of suffixes with S-prefix p
    auto prefix_cmp = [&](std::uint64_t off) {
      std::string_view s = text_.substr(off, p.size());
      std::size_t m = std::min(s.size(), p.size());
      for (std::size_t i = 0; i < m; ++i) {
        int rs = rk_[static_cast<unsigned char>(s[i])];
        int rp = rk_[static_cast<unsigned char>(p[i])];
        if (rs != rp) return rs < rp ? -1 : 1;
      }
      return s.size() < p.size() ? -1 : 0;
    };
    auto lo_it = std::partition_point(order->begin(), order->end(),
                                      [&](std::uint64_t o) { return prefix_cmp(o) < 0; });
    auto hi_it = std::partition_point(lo_it, order->end(),
                                      [&](std::uint64_t o) { return prefix_cmp(o) == 0; });
    descend(*order, 0, static_cast<std::size_t>(lo_it - order->begin()),
            static_cast<std::size_t>(hi_it - order->begin()), 0);
  }

  // Narrows [lo,hi) to suffixes whose symbol at `depth` has rank r.
  static std::pair<std::size_t, std::size_t> narrow(const std::vector<std::uint64_t>& order,
                                                    std::string_view text,
                                                    const std::array<int, 256>& rk,
                                                    std::size_t lo, std::size_t hi,
                                                    std::uint64_t depth, int r) {
    auto at = [&](std::size_t k) {
      std::uint64_t pos = order[k] + depth;
      return pos < text.size() ? rk[static_cast<unsigned char>(text[pos])] : -1;
    };
    std::size_t a = lo, b = hi;
    while (a < b) {
      std::size_t mid = (a + b) / 2;
      if (at(mid) < r) a = mid + 1; else b = mid;
    }
    std::size_t c = a, d = hi;
    while (c < d) {
      std::size_t mid = (c + d) / 2;
      if (at(mid) <= r) c = mid + 1; else d = mid;
    }
    return {a, c};
  }

  void descend(const std::vector<std::uint64_t>& order, std::uint32_t id,
               std::size_t lo, std::size_t hi, std::uint64_t depth) {
    struct frame {
      std::uint32_t id;
      std::size_t lo, hi;
      std::uint64_t depth;  // path depth at the node's parent side of its edge
    };
    const std::uint64_t plen = t_.prefix().size();
    std::vector<frame> stack{{id, lo, hi, depth}};
    while (!stack.empty()) {
      frame fr = stack.back();
      stack.pop_back();
      std::uint64_t d = fr.depth;
      std::size_t l = fr.lo, h = fr.hi;
      if (fr.id != 0) {
        const auto& lab = t_.at(fr.id).label;
        for (std::uint64_t k = lab.start; k < lab.end; ++k, ++d) {
          int r = rank_at(k);
          if (d < plen) continue;  // inside the partition prefix: shared by construction
          if (h - l == 1) {
            // unique occurrence: verify it really continues with this symbol
            std::uint64_t pos = order[l] + d;
            if (pos >= text_.size() || rank_at(pos) != r) {
              add("path label not always followed by its next symbol", fr.id);
              return;
            }
            continue;
          }
          auto [a, b] = narrow(order, text_, rk_, l, h, d, r);
          if (b - a != h - l) {
            add("path label not always followed by its next symbol", fr.id);
            return;
          }
          l = a;
          h = b;
        }
      }
      if (t_.is_leaf(fr.id)) {
        if (h - l != 1) {
          add("leaf path label occurs " + std::to_string(h - l) + " times in text",
              fr.id);
          return;
        }
        if (order[l] != t_.at(fr.id).leaf_offset) {
          add("leaf offset does not match its path label", fr.id);
          return;
        }
        continue;
      }
      if (fr.id != 0 && d >= plen && h - l < 2) {
        add("internal path label occurs once in text", fr.id);
        return;
      }
      // partition the range among the children (branch symbols)
      std::size_t cursor = l;
      for (std::uint32_t c = t_.at(fr.id).first_child; c != subtree::npos;
           c = t_.at(c).next_sibling) {
        int r = rank_at(t_.at(c).label.start);
        auto [a, b] = narrow(order, text_, rk_, l, h, d, r);
        if (a == b) {
          add("branch symbol never occurs after the path label", c);
          return;
        }
        if (d >= plen && a != cursor) {
          add("missing branch: text continues with an unrepresented symbol", fr.id);
          return;
        }
        cursor = b;
        stack.push_back({c, a, b, d});
      }
      if (d >= plen && cursor != h) {
        add("missing branch: text continues with an unrepresented symbol", fr.id);
        return;
      }
    }
  }

  const subtree& t_;
  std::string_view text_;
  const alphabet& ab_;
  const validate_options& opt_;
  std::array<int, 256> rk_;
  std::vector<violation> out_;
};

}  // namespace

std::vector<violation> validate_subtree(const subtree& tree, std::string_view text,
                                        const alphabet& ab, const validate_options& opt) {
  return validator(tree, text, ab, opt).run();
}

}  // namespace era
