#include "era/index_format.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

namespace era {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// bounds-checked little-endian cursor
struct cursor {
  std::string_view data;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > data.size()) raise(errc::corrupt_index, "truncated index section");
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view v = data.substr(pos, n);
    pos += n;
    return v;
  }
  bool done() const { return pos == data.size(); }
};

std::array<std::uint32_t, 256> make_crc_table() {
  std::array<std::uint32_t, 256> t{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
    t[i] = c;
  }
  return t;
}

}  // namespace

std::uint32_t crc32(std::string_view data, std::uint32_t seed) {
  static const auto table = make_crc_table();
  std::uint32_t c = seed ^ 0xffffffffu;
  for (char ch : data)
    c = table[(c ^ static_cast<unsigned char>(ch)) & 0xff] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

void serialize_subtree(const subtree& tree, std::string& out) {
  put_u32(out, static_cast<std::uint32_t>(tree.prefix().size()));
  out.append(tree.prefix());
  put_u64(out, tree.node_count());
  tree.visit_preorder([&](std::uint32_t id, std::uint64_t) {
    const auto& nd = tree.at(id);
    put_u64(out, nd.label.start);
    put_u64(out, nd.label.end);
    std::uint32_t cc = tree.child_count(id);
    put_u16(out, static_cast<std::uint16_t>(cc));
    if (cc == 0) put_u64(out, nd.leaf_offset);
  });
}

std::uint64_t serialize_subtree_stream(const subtree& tree, std::ostream& out) {
  std::string buf;
  buf.reserve(1 << 16);
  std::uint64_t total = 0;
  auto flush = [&](bool force) {
    if (buf.size() >= (1 << 16) - 64 || (force && !buf.empty())) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      total += buf.size();
      buf.clear();
    }
  };
  put_u32(buf, static_cast<std::uint32_t>(tree.prefix().size()));
  buf.append(tree.prefix());
  put_u64(buf, tree.node_count());
  tree.visit_preorder([&](std::uint32_t id, std::uint64_t) {
    const auto& nd = tree.at(id);
    put_u64(buf, nd.label.start);
    put_u64(buf, nd.label.end);
    std::uint32_t cc = tree.child_count(id);
    put_u16(buf, static_cast<std::uint16_t>(cc));
    if (cc == 0) put_u64(buf, nd.leaf_offset);
    flush(false);
  });
  flush(true);
  return total;
}

subtree deserialize_subtree(std::string_view payload) {
  cursor c{payload};
  std::uint32_t plen = c.u32();
  std::string prefix(c.bytes(plen));
  std::uint64_t node_count = c.u64();
  if (node_count < 2) raise(errc::corrupt_index, "sub-tree with fewer than two nodes");

  subtree t(std::move(prefix));
  t.reserve(node_count);

  // root record
  std::uint64_t rs = c.u64(), re = c.u64();
  std::uint16_t rcc = c.u16();
  if (rs != 0 || re != 0 || rcc == 0)
    raise(errc::corrupt_index, "malformed sub-tree root record");

  struct frame {
    std::uint32_t id;
    std::uint32_t remaining;
    std::uint32_t last_child;
  };
  std::vector<frame> stack{{t.root(), rcc, subtree::npos}};

  for (std::uint64_t k = 1; k < node_count; ++k) {
    if (stack.empty()) raise(errc::corrupt_index, "sub-tree records exceed the tree shape");
    std::uint64_t s = c.u64(), e = c.u64();
    std::uint16_t cc = c.u16();
    std::uint64_t leaf = subtree::not_a_leaf;
    if (cc == 0) leaf = c.u64();
    if (s >= e) raise(errc::corrupt_index, "empty edge label");
    std::uint32_t id = t.add_node({s, e}, leaf);
    frame& top = stack.back();
    if (top.last_child == subtree::npos)
      t.link_first_child(top.id, id);
    else
      t.link_next_sibling(top.last_child, id);
    top.last_child = id;
    --top.remaining;
    if (cc > 0) {
      stack.push_back({id, cc, subtree::npos});
    } else {
      while (!stack.empty() && stack.back().remaining == 0) stack.pop_back();
    }
  }
  if (!stack.empty()) raise(errc::corrupt_index, "sub-tree ends with open nodes");
  if (!c.done()) raise(errc::corrupt_index, "trailing bytes after sub-tree records");
  return t;
}

namespace {

std::string serialize_trie(const top_trie& trie) {
  std::string out;
  put_u64(out, trie.entries.size());
  for (const auto& e : trie.entries) {
    put_u32(out, static_cast<std::uint32_t>(e.prefix.size()));
    out.append(e.prefix);
    put_u64(out, e.record_id);
    put_u64(out, e.frequency);
  }
  return out;
}

top_trie deserialize_trie(std::string_view payload) {
  cursor c{payload};
  top_trie trie;
  std::uint64_t count = c.u64();
  trie.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    trie_entry e;
    std::uint32_t plen = c.u32();
    e.prefix = std::string(c.bytes(plen));
    e.record_id = c.u64();
    e.frequency = c.u64();
    trie.entries.push_back(std::move(e));
  }
  if (!c.done()) raise(errc::corrupt_index, "trailing bytes after trie entries");
  return trie;
}

std::string build_header(const index_meta& meta, std::uint64_t section_count) {
  std::string h;
  h.append(kIndexMagic, 4);
  put_u32(h, kFormatVersion);
  put_u64(h, meta.n_plus_1);
  put_u32(h, static_cast<std::uint32_t>(meta.base_symbols.size()));
  h.append(meta.base_symbols);
  h.push_back(static_cast<char>(meta.sentinel));
  put_u32(h, static_cast<std::uint32_t>(meta.text_path.size()));
  h.append(meta.text_path);
  put_u64(h, meta.group_count);
  put_u64(h, section_count);
  return h;  // the section table follows, appended by the writers
}

struct table_slot {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint32_t crc = 0;
};

void append_table(std::string& h, std::span<const table_slot> slots) {
  for (const auto& s : slots) {
    put_u64(h, s.offset);
    put_u64(h, s.length);
    put_u32(h, s.crc);
  }
}

}  // namespace

void write_index(const std::filesystem::path& path, const index_meta& meta,
                 const top_trie& trie, std::span<const subtree> trees) {
  std::string header = build_header(meta, 1 + trees.size());
  std::vector<table_slot> slots(1 + trees.size());

  std::string body;
  {
    std::string trie_payload = serialize_trie(trie);
    slots[0] = {0, trie_payload.size(), crc32(trie_payload)};
    body += trie_payload;
  }
  for (std::size_t i = 0; i < trees.size(); ++i) {
    std::string payload;
    serialize_subtree(trees[i], payload);
    slots[1 + i] = {body.size(), payload.size(), crc32(payload)};
    body += payload;
  }

  std::uint64_t base = header.size() + slots.size() * 20;
  for (auto& s : slots) s.offset += base;
  append_table(header, slots);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.flush();
  if (!out) raise(errc::io_failure, "write failed on " + path.string());
}

void write_index_from_files(const std::filesystem::path& path, const index_meta& meta,
                            const top_trie& trie, std::span<const section_source> parts) {
  std::size_t tree_sections = 0;
  for (const auto& p : parts) tree_sections += p.lengths.size();

  std::string header = build_header(meta, 1 + tree_sections);
  std::vector<table_slot> slots;
  slots.reserve(1 + tree_sections);
  std::uint64_t table_bytes = (1 + tree_sections) * 20;
  std::uint64_t cursor_off = header.size() + table_bytes;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  // placeholder header + table; rewritten once checksums are known
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  {
    std::string zeros(table_bytes, '\0');
    out.write(zeros.data(), static_cast<std::streamsize>(zeros.size()));
  }

  std::string trie_payload = serialize_trie(trie);
  slots.push_back({cursor_off, trie_payload.size(), crc32(trie_payload)});
  out.write(trie_payload.data(), static_cast<std::streamsize>(trie_payload.size()));
  cursor_off += trie_payload.size();

  constexpr std::uint64_t kChunk = 1 << 20;
  std::string buf;
  for (const auto& part : parts) {
    std::ifstream in(part.file, std::ios::binary);
    if (!in) raise(errc::io_failure, "cannot read section file " + part.file.string());
    in.seekg(static_cast<std::streamoff>(part.offset));
    for (std::uint64_t len : part.lengths) {
      std::uint32_t crc = 0;
      std::uint64_t left = len;
      slots.push_back({cursor_off, len, 0});
      while (left > 0) {
        std::uint64_t m = std::min(left, kChunk);
        buf.resize(m);
        in.read(buf.data(), static_cast<std::streamsize>(m));
        if (!in) raise(errc::io_failure, "short section file " + part.file.string());
        crc = crc32(buf, crc);
        out.write(buf.data(), static_cast<std::streamsize>(m));
        left -= m;
      }
      slots.back().crc = crc;
      cursor_off += len;
    }
  }

  std::string table;
  append_table(table, slots);
  out.seekp(static_cast<std::streamoff>(header.size()));
  out.write(table.data(), static_cast<std::streamsize>(table.size()));
  out.flush();
  if (!out) raise(errc::io_failure, "write failed on " + path.string());
}

index_reader index_reader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open " + path.string());
  std::uint64_t file_size = std::filesystem::file_size(path);

  auto read_at = [&](std::uint64_t off, std::uint64_t len) {
    std::string buf(len, '\0');
    in.seekg(static_cast<std::streamoff>(off));
    in.read(buf.data(), static_cast<std::streamsize>(len));
    if (!in) raise(errc::corrupt_index, "index file truncated");
    return buf;
  };

  if (file_size < 4) raise(errc::corrupt_index, "index file too small");
  std::string head = read_at(0, std::min<std::uint64_t>(file_size, 4096));
  if (std::memcmp(head.data(), kIndexMagic, 4) != 0)
    raise(errc::unsupported_format, "not an index file (bad magic)");

  index_reader r;
  r.path_ = path;
  {
    // header fields can straddle the probe window; re-read generously
    cursor c{head};
    c.bytes(4);
    std::uint32_t version = c.u32();
    if (version != kFormatVersion)
      raise(errc::unsupported_format,
            "unsupported index version " + std::to_string(version));
    std::uint64_t fixed_need = 4 + 4 + 8 + 4;
    if (file_size < fixed_need) raise(errc::corrupt_index, "index header truncated");
    r.meta_.n_plus_1 = c.u64();
    std::uint32_t base_count = c.u32();
    if (base_count > 255) raise(errc::corrupt_index, "alphabet too large");
    std::uint64_t header_len_guess = fixed_need + base_count + 1 + 4;
    if (header_len_guess + 8 > file_size) raise(errc::corrupt_index, "index header truncated");
    if (head.size() < file_size && head.size() < header_len_guess + (1u << 20))
      head = read_at(0, std::min<std::uint64_t>(file_size, header_len_guess + (1u << 20)));
    cursor c2{head};
    c2.bytes(4);
    c2.u32();
    c2.u64();
    c2.u32();
    r.meta_.base_symbols = std::string(c2.bytes(base_count));
    r.meta_.sentinel = static_cast<symbol>(c2.bytes(1)[0]);
    std::uint32_t path_len = c2.u32();
    if (c2.pos + path_len + 16 > file_size) raise(errc::corrupt_index, "index header truncated");
    if (head.size() < c2.pos + path_len + 16) {
      head = read_at(0, c2.pos + path_len + 16);
      c2 = cursor{head};
      c2.bytes(4);
      c2.u32();
      c2.u64();
      c2.u32();
      c2.bytes(base_count);
      c2.bytes(1);
      c2.u32();
    }
    r.meta_.text_path = std::string(c2.bytes(path_len));
    r.meta_.group_count = c2.u64();
    std::uint64_t section_count = c2.u64();
    if (section_count < 1 || section_count > file_size / 20 + 1)
      raise(errc::corrupt_index, "implausible section count");

    std::uint64_t table_off = c2.pos;
    std::uint64_t table_len = section_count * 20;
    if (table_off + table_len > file_size) raise(errc::corrupt_index, "section table truncated");
    std::string table = read_at(table_off, table_len);
    cursor tc{table};
    std::uint64_t expect = table_off + table_len;
    r.sections_.reserve(section_count);
    for (std::uint64_t i = 0; i < section_count; ++i) {
      section s;
      s.offset = tc.u64();
      s.length = tc.u64();
      s.crc = tc.u32();
      if (s.offset != expect)
        raise(errc::corrupt_index, "section " + std::to_string(i) + " misplaced");
      expect = s.offset + s.length;
      if (expect > file_size) raise(errc::corrupt_index, "section beyond file end");
      r.sections_.push_back(s);
    }
    if (expect != file_size)
      raise(errc::corrupt_index, "file length disagrees with the section table");
  }

  try {
    r.ab_.emplace(r.meta_.base_symbols, r.meta_.sentinel);
  } catch (const error&) {
    raise(errc::corrupt_index, "index alphabet is not well formed");
  }

  // verify every checksum up front so any byte flip fails the open
  for (std::size_t i = 0; i < r.sections_.size(); ++i) {
    std::string payload = read_at(r.sections_[i].offset, r.sections_[i].length);
    if (crc32(payload) != r.sections_[i].crc)
      raise(errc::corrupt_index, "checksum mismatch in section " + std::to_string(i));
    if (i == 0) r.trie_ = deserialize_trie(payload);
  }

  if (r.trie_.entries.size() != r.sections_.size() - 1)
    raise(errc::corrupt_index, "trie entry count disagrees with the section count");
  if (r.trie_.total_frequency() != r.meta_.n_plus_1)
    raise(errc::corrupt_index, "trie frequencies do not cover the text");
  for (std::size_t i = 0; i < r.trie_.entries.size(); ++i) {
    const auto& e = r.trie_.entries[i];
    if (e.record_id + 1 >= r.sections_.size())
      raise(errc::corrupt_index, "trie entry points to a missing section");
    if (i > 0) {
      const auto& prev = r.trie_.entries[i - 1];
      if (r.ab_->compare(prev.prefix, e.prefix) >= 0)
        raise(errc::corrupt_index, "trie entries out of order");
      if (e.prefix.compare(0, prev.prefix.size(), prev.prefix) == 0)
        raise(errc::corrupt_index, "trie entries are not prefix-free");
    }
    r.exact_.emplace(e.prefix, static_cast<std::uint32_t>(i));
  }
  return r;
}

std::string index_reader::read_section(std::uint64_t id) const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open " + path_.string());
  const section& s = sections_[id];
  std::string buf(s.length, '\0');
  in.seekg(static_cast<std::streamoff>(s.offset));
  in.read(buf.data(), static_cast<std::streamsize>(s.length));
  if (!in) raise(errc::corrupt_index, "index file truncated");
  return buf;
}

subtree index_reader::load_subtree(std::uint64_t record_id) const {
  if (record_id + 1 >= sections_.size())
    raise(errc::corrupt_index, "sub-tree record out of range");
  return deserialize_subtree(read_section(record_id + 1));
}

text_reader index_reader::open_text(std::size_t block_size,
                                    const std::optional<std::filesystem::path>& override_path) const {
  std::filesystem::path p = override_path ? *override_path
                                          : std::filesystem::path(meta_.text_path);
  return text_reader::open_file(p, *ab_, block_size);
}

std::vector<std::uint64_t> index_reader::find(std::string_view pattern,
                                              text_reader& text) const {
  if (pattern.empty()) raise(errc::precondition, "empty pattern");
  for (char ch : pattern) ab_->rank(static_cast<symbol>(ch));  // throws invalid_symbol

  std::vector<std::uint64_t> hits;

  // entries that extend the pattern: their whole sub-trees match
  auto starts_with = [](std::string_view s, std::string_view p) {
    return s.size() >= p.size() && std::memcmp(s.data(), p.data(), p.size()) == 0;
  };
  auto lo = std::partition_point(
      trie_.entries.begin(), trie_.entries.end(), [&](const trie_entry& e) {
        return ab_->compare(e.prefix, pattern) < 0 && !starts_with(e.prefix, pattern);
      });
  auto hi = std::partition_point(lo, trie_.entries.end(), [&](const trie_entry& e) {
    return starts_with(e.prefix, pattern);
  });
  if (lo != hi) {
    for (auto it = lo; it != hi; ++it) {
      subtree t = load_subtree(it->record_id);
      for (std::uint64_t off : t.leaf_offsets()) hits.push_back(off);
    }
    std::sort(hits.begin(), hits.end());
    return hits;
  }

  // otherwise at most one entry is a proper prefix of the pattern
  for (std::size_t len = pattern.size() - 1; len >= 1; --len) {
    auto it = exact_.find(std::string(pattern.substr(0, len)));
    if (it == exact_.end()) continue;
    subtree t = load_subtree(trie_.entries[it->second].record_id);
    // match the pattern inside the sub-tree, labels read from the text
    std::uint32_t cur = t.root();
    std::uint64_t d = 0;
    std::string label;
    while (d < pattern.size()) {
      std::uint32_t child = t.at(cur).first_child;
      std::uint32_t chosen = subtree::npos;
      for (; child != subtree::npos; child = t.at(child).next_sibling) {
        text.read_range_into(t.at(child).label.start, 1, label);
        if (static_cast<symbol>(label[0]) == static_cast<symbol>(pattern[d])) {
          chosen = child;
          break;
        }
      }
      if (chosen == subtree::npos) return {};
      const edge_label lab = t.at(chosen).label;
      std::uint64_t m = std::min<std::uint64_t>(lab.length(), pattern.size() - d);
      text.read_range_into(lab.start, m, label);
      if (std::memcmp(label.data(), pattern.data() + d, m) != 0) return {};
      d += m;
      if (d == pattern.size()) {
        // collect every leaf under the match point
        std::vector<std::uint32_t> stack{chosen};
        while (!stack.empty()) {
          std::uint32_t id = stack.back();
          stack.pop_back();
          if (t.is_leaf(id)) hits.push_back(t.at(id).leaf_offset);
          for (std::uint32_t c = t.at(id).first_child; c != subtree::npos;
               c = t.at(c).next_sibling)
            stack.push_back(c);
        }
        std::sort(hits.begin(), hits.end());
        return hits;
      }
      cur = chosen;
    }
    break;
  }
  return {};
}

void index_reader::enumerate_suffixes(const std::function<void(std::uint64_t)>& fn) const {
  for (const auto& e : trie_.entries) {
    std::string payload = read_section(e.record_id + 1);
    cursor c{payload};
    std::uint32_t plen = c.u32();
    c.bytes(plen);
    std::uint64_t node_count = c.u64();
    for (std::uint64_t k = 0; k < node_count; ++k) {
      c.u64();
      c.u64();
      std::uint16_t cc = c.u16();
      if (cc == 0) fn(c.u64());
    }
    if (!c.done()) raise(errc::corrupt_index, "trailing bytes after sub-tree records");
  }
}

std::vector<std::uint64_t> index_reader::enumerate_suffixes() const {
  std::vector<std::uint64_t> out;
  out.reserve(meta_.n_plus_1);
  enumerate_suffixes([&](std::uint64_t off) { out.push_back(off); });
  return out;
}

namespace {

// Deep-copies `src_node` (label overridden) and its descendants into dst.
std::uint32_t copy_subtree_into(subtree& dst, const subtree& src, std::uint32_t src_node,
                                edge_label label_override) {
  const auto& sn = src.at(src_node);
  std::uint32_t top = dst.add_node(label_override, sn.leaf_offset);

  std::unordered_map<std::uint32_t, std::uint32_t> last_child;  // dst parent -> last child
  auto link_child = [&](std::uint32_t parent, std::uint32_t child) {
    auto it = last_child.find(parent);
    if (it == last_child.end()) {
      dst.link_first_child(parent, child);
      last_child.emplace(parent, child);
    } else {
      dst.link_next_sibling(it->second, child);
      it->second = child;
    }
  };

  struct frame {
    std::uint32_t src_id;
    std::uint32_t dst_parent;
  };
  std::vector<frame> stack;
  for (std::uint32_t c = sn.first_child; c != subtree::npos; c = src.at(c).next_sibling)
    stack.push_back({c, top});
  std::reverse(stack.begin(), stack.end());
  while (!stack.empty()) {
    frame fr = stack.back();
    stack.pop_back();
    const auto& nd = src.at(fr.src_id);
    std::uint32_t id = dst.add_node(nd.label, nd.leaf_offset);
    link_child(fr.dst_parent, id);
    std::vector<std::uint32_t> kids;
    for (std::uint32_t c = nd.first_child; c != subtree::npos; c = src.at(c).next_sibling)
      kids.push_back(c);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({*it, id});
  }
  return top;
}

std::uint64_t byte_lcp(std::string_view a, std::string_view b) {
  std::uint64_t m = std::min(a.size(), b.size());
  std::uint64_t k = 0;
  while (k < m && a[k] == b[k]) ++k;
  return k;
}

}  // namespace

subtree index_reader::assemble_full_tree() const {
  std::vector<subtree> trees;
  trees.reserve(trie_.entries.size());
  for (const auto& e : trie_.entries) trees.push_back(load_subtree(e.record_id));

  subtree full("");

  // the single child under a sub-tree root, with the first `trim` symbols
  // of its label cut away (they are spelled by the path above)
  auto attach_trimmed = [&](std::size_t item, std::uint64_t trim) {
    const subtree& t = trees[item];
    std::uint32_t top = t.at(t.root()).first_child;
    edge_label lab = t.at(top).label;
    return copy_subtree_into(full, t, top, {lab.start + trim, lab.end});
  };

  // recursive grouping of trie entries by their symbol at each depth
  struct range_job {
    std::size_t lo, hi;
    std::uint64_t depth;
    std::uint32_t parent;
  };
  std::vector<range_job> jobs{{0, trie_.entries.size(), 0, full.root()}};
  std::vector<std::pair<std::uint32_t, std::uint32_t>> last_child;
  auto link_child = [&](std::uint32_t parent, std::uint32_t child) {
    for (auto& lc : last_child)
      if (lc.first == parent) {
        full.link_next_sibling(lc.second, child);
        lc.second = child;
        return;
      }
    full.link_first_child(parent, child);
    last_child.emplace_back(parent, child);
  };

  while (!jobs.empty()) {
    range_job j = jobs.back();
    jobs.pop_back();
    if (j.hi - j.lo == 1) {
      link_child(j.parent, attach_trimmed(j.lo, j.depth));
      continue;
    }
    // split [lo,hi) into runs sharing the symbol at j.depth; queue the runs
    // in reverse so children attach in ascending order
    std::vector<range_job> runs;
    std::size_t a = j.lo;
    while (a < j.hi) {
      std::size_t b = a + 1;
      char sym = trie_.entries[a].prefix[j.depth];
      while (b < j.hi && trie_.entries[b].prefix[j.depth] == sym) ++b;
      if (b - a == 1) {
        runs.push_back({a, b, j.depth, j.parent});
      } else {
        std::uint64_t dstar =
            byte_lcp(trie_.entries[a].prefix, trie_.entries[b - 1].prefix);
        const subtree& t0 = trees[a];
        std::uint32_t top0 = t0.at(t0.root()).first_child;
        std::uint64_t x = t0.at(top0).label.start;  // first leaf position of the run
        std::uint32_t node = full.add_node({x + j.depth, x + dstar});
        link_child(j.parent, node);
        runs.push_back({a, b, dstar, node});
      }
      a = b;
    }
    for (auto it = runs.rbegin(); it != runs.rend(); ++it) jobs.push_back(*it);
  }
  return full;
}

}  // namespace era
