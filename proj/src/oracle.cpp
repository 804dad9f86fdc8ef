#include "era/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace era::oracle {

namespace {

std::uint64_t lcp_len(std::string_view a, std::string_view b) {
  std::uint64_t m = std::min(a.size(), b.size());
  std::uint64_t k = 0;
  while (k < m && a[k] == b[k]) ++k;
  return k;
}

}  // namespace

std::vector<std::uint64_t> find_occurrences(std::string_view text, std::string_view pattern) {
  std::vector<std::uint64_t> out;
  if (pattern.empty() || pattern.size() > text.size()) return out;
  for (std::size_t i = 0; i + pattern.size() <= text.size(); ++i)
    if (std::memcmp(text.data() + i, pattern.data(), pattern.size()) == 0)
      out.push_back(i);
  return out;
}

lb_pair naive_lb(std::string_view text, std::string_view prefix, const alphabet& ab) {
  lb_pair r;
  r.leaves = find_occurrences(text, prefix);
  std::sort(r.leaves.begin(), r.leaves.end(), [&](std::uint64_t a, std::uint64_t b) {
    return ab.compare(text.substr(a), text.substr(b)) < 0;
  });
  for (std::size_t i = 1; i < r.leaves.size(); ++i) {
    std::string_view sa = text.substr(r.leaves[i - 1]);
    std::string_view sb = text.substr(r.leaves[i]);
    std::uint64_t off = lcp_len(sa, sb);
    r.branches.push_back(branch_record{static_cast<symbol>(sa[off]),
                                       static_cast<symbol>(sb[off]), off});
  }
  return r;
}

subtree naive_tree(std::string_view text, const alphabet& ab) {
  const std::uint64_t n1 = text.size();
  subtree t("");

  auto first_symbol_rank = [&](std::uint32_t node) {
    return ab.rank(static_cast<symbol>(text[t.at(node).label.start]));
  };

  // inserts `child` into `parent`'s list keeping children in symbol order
  auto insert_child = [&](std::uint32_t parent, std::uint32_t child) {
    int r = first_symbol_rank(child);
    std::uint32_t prev = subtree::npos;
    std::uint32_t cur = t.at(parent).first_child;
    while (cur != subtree::npos && first_symbol_rank(cur) < r) {
      prev = cur;
      cur = t.at(cur).next_sibling;
    }
    t.link_next_sibling(child, cur);
    if (prev == subtree::npos)
      t.link_first_child(parent, child);
    else
      t.link_next_sibling(prev, child);
  };

  for (std::uint64_t i = 0; i < n1; ++i) {
    std::uint32_t cur = t.root();
    std::uint64_t depth = 0;
    for (;;) {
      symbol next = static_cast<symbol>(text[i + depth]);
      std::uint32_t child = t.at(cur).first_child;
      while (child != subtree::npos &&
             static_cast<symbol>(text[t.at(child).label.start]) != next)
        child = t.at(child).next_sibling;
      if (child == subtree::npos) {
        std::uint32_t leaf = t.add_node({i + depth, n1}, i);
        insert_child(cur, leaf);
        break;
      }
      edge_label lab = t.at(child).label;
      std::uint64_t j = 1;
      while (j < lab.length() && text[lab.start + j] == text[i + depth + j]) ++j;
      if (j == lab.length()) {
        cur = child;
        depth += j;
        continue;
      }
      // split the edge after j matched symbols
      std::uint32_t mid = t.add_node({lab.start, lab.start + j});
      // mid takes child's place in cur's list
      std::uint32_t prev = subtree::npos;
      std::uint32_t c = t.at(cur).first_child;
      while (c != child) {
        prev = c;
        c = t.at(c).next_sibling;
      }
      t.link_next_sibling(mid, t.at(child).next_sibling);
      if (prev == subtree::npos)
        t.link_first_child(cur, mid);
      else
        t.link_next_sibling(prev, mid);
      t.set_label(child, {lab.start + j, lab.end});
      t.link_next_sibling(child, subtree::npos);
      t.link_first_child(mid, child);
      std::uint32_t leaf = t.add_node({i + depth + j, n1}, i);
      insert_child(mid, leaf);
      break;
    }
  }
  return t;
}

namespace {

struct flat_node {
  std::uint64_t label_start, label_end;
  std::uint32_t child_count;
  std::uint64_t leaf_offset;
};

std::vector<flat_node> flatten(const subtree& t) {
  std::vector<flat_node> out;
  out.reserve(t.node_count());
  t.visit_preorder([&](std::uint32_t id, std::uint64_t) {
    const auto& nd = t.at(id);
    out.push_back({nd.label.start, nd.label.end, t.child_count(id), nd.leaf_offset});
  });
  return out;
}

}  // namespace

bool trees_equal(const subtree& a, const subtree& b, std::string_view text) {
  auto fa = flatten(a);
  auto fb = flatten(b);
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    const auto& x = fa[i];
    const auto& y = fb[i];
    if (x.child_count != y.child_count) return false;
    if (x.leaf_offset != y.leaf_offset) return false;
    std::uint64_t lx = x.label_end - x.label_start;
    std::uint64_t ly = y.label_end - y.label_start;
    if (lx != ly) return false;
    if (lx > 0 && std::memcmp(text.data() + x.label_start, text.data() + y.label_start,
                              lx) != 0)
      return false;
  }
  return true;
}

std::vector<violation> check_proposition1(std::string_view text, const subtree& tree,
                                          const alphabet& ab) {
  std::vector<violation> out;
  auto add = [&](std::string what, std::uint32_t node) { out.push_back({std::move(what), node}); };
  const std::uint64_t n1 = text.size();

  struct frame {
    std::uint32_t id;
    std::uint64_t depth;
    std::vector<std::uint64_t> positions;  // where the node's path label occurs
  };

  std::vector<frame> stack;
  {
    frame root;
    root.id = tree.root();
    root.depth = 0;
    root.positions = find_occurrences(text, tree.prefix());
    if (tree.prefix().empty()) {
      root.positions.resize(n1);
      for (std::uint64_t i = 0; i < n1; ++i) root.positions[i] = i;
    }
    stack.push_back(std::move(root));
  }

  while (!stack.empty() && out.empty()) {
    frame fr = std::move(stack.back());
    stack.pop_back();

    std::size_t claimed = 0;
    for (std::uint32_t c = tree.at(fr.id).first_child; c != subtree::npos;
         c = tree.at(c).next_sibling) {
      edge_label lab = tree.at(c).label;
      // occurrences that continue with the branch symbol
      std::vector<std::uint64_t> sub;
      for (std::uint64_t pos : fr.positions)
        if (pos + fr.depth < n1 && text[pos + fr.depth] == text[lab.start])
          sub.push_back(pos);
      if (sub.empty()) {
        add("branch symbol never follows the path label in the text", c);
        break;
      }
      claimed += sub.size();

      // inside the label every occurrence must keep following along
      if (sub.size() == 1) {
        std::uint64_t pos = sub[0];
        if (pos + fr.depth + lab.length() > n1 ||
            std::memcmp(text.data() + lab.start, text.data() + pos + fr.depth,
                        lab.length()) != 0) {
          add("label symbol does not always follow its path label", c);
          break;
        }
      } else {
        bool bad = false;
        for (std::uint64_t j = 1; j < lab.length() && !bad; ++j) {
          std::size_t kept = 0;
          for (std::uint64_t pos : sub)
            if (pos + fr.depth + j < n1 && text[pos + fr.depth + j] == text[lab.start + j])
              sub[kept++] = pos;
          if (kept != sub.size()) {
            add("label symbol does not always follow its path label", c);
            bad = true;
          }
          sub.resize(kept);
        }
        if (bad) break;
      }

      std::uint64_t cdepth = fr.depth + lab.length();
      if (tree.is_leaf(c)) {
        if (sub.size() != 1) {
          add("leaf path label occurs " + std::to_string(sub.size()) + " times", c);
          break;
        }
        if (sub[0] != tree.at(c).leaf_offset) {
          add("leaf path label occurs at a different position", c);
          break;
        }
      } else {
        if (sub.size() < 2) {
          add("internal path label occurs only once", c);
          break;
        }
        stack.push_back({c, cdepth, std::move(sub)});
      }
    }
    if (!out.empty()) break;
    if (tree.at(fr.id).first_child != subtree::npos && claimed != fr.positions.size())
      add("an occurrence continues with a symbol no branch covers", fr.id);
  }
  return out;
}

std::uint64_t longest_repeat_depth(std::string_view text, std::string_view prefix,
                                   const alphabet& ab) {
  auto lb = naive_lb(text, prefix, ab);
  std::uint64_t deepest = prefix.size();
  for (const auto& b : lb.branches) deepest = std::max(deepest, b.offset);
  return deepest;
}

}  // namespace era::oracle
