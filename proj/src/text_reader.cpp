#include "era/text_reader.hpp"

#include <algorithm>
#include <cassert>

namespace era {

namespace {
constexpr std::uint64_t kNoBlock = ~0ull;
}

text_reader text_reader::open_file(const std::filesystem::path& path, const alphabet& ab,
                                   std::size_t block_size, memory_ledger* ledger) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open " + path.string());

  std::uint64_t file_len = std::filesystem::file_size(path);
  bool saw_final_sentinel = false;
  {
    std::string chunk(1 << 20, '\0');
    std::uint64_t offset = 0;
    while (offset < file_len) {
      std::uint64_t m = std::min<std::uint64_t>(chunk.size(), file_len - offset);
      in.read(chunk.data(), static_cast<std::streamsize>(m));
      if (!in) raise(errc::io_failure, "short read on " + path.string());
      validate_bytes(std::string_view(chunk.data(), m), offset, ab, file_len,
                     &saw_final_sentinel);
      offset += m;
    }
  }

  text_reader r;
  r.ab_ = &ab;
  r.path_ = path;
  r.file_ = std::move(in);
  r.is_file_ = true;
  r.disk_len_ = file_len;
  r.sentinel_on_disk_ = saw_final_sentinel;
  r.n_plus_1_ = file_len + (saw_final_sentinel ? 0 : 1);
  r.block_size_ = block_size;
  r.init_ledger(ledger);
  return r;
}

text_reader text_reader::from_memory(std::string bytes, const alphabet& ab,
                                     std::size_t block_size, memory_ledger* ledger) {
  bool saw_final_sentinel = false;
  validate_bytes(bytes, 0, ab, bytes.size(), &saw_final_sentinel);
  if (!saw_final_sentinel) bytes.push_back(static_cast<char>(ab.sentinel()));

  text_reader r;
  r.ab_ = &ab;
  r.memory_ = std::move(bytes);
  r.is_file_ = false;
  r.disk_len_ = r.memory_.size();
  r.sentinel_on_disk_ = true;
  r.n_plus_1_ = r.memory_.size();
  r.block_size_ = block_size;
  r.init_ledger(ledger);
  return r;
}

text_reader text_reader::reopen(const std::filesystem::path& path, const alphabet& ab,
                                std::uint64_t n_plus_1, bool sentinel_on_disk,
                                std::size_t block_size, memory_ledger* ledger) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open " + path.string());
  text_reader r;
  r.ab_ = &ab;
  r.path_ = path;
  r.file_ = std::move(in);
  r.is_file_ = true;
  r.disk_len_ = n_plus_1 - (sentinel_on_disk ? 0 : 1);
  r.sentinel_on_disk_ = sentinel_on_disk;
  r.n_plus_1_ = n_plus_1;
  r.block_size_ = block_size;
  r.init_ledger(ledger);
  return r;
}

void text_reader::validate_bytes(std::string_view chunk, std::uint64_t base_offset,
                                 const alphabet& ab, std::uint64_t file_len,
                                 bool* saw_final_sentinel) {
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    symbol s = static_cast<symbol>(chunk[i]);
    std::uint64_t off = base_offset + i;
    if (s == ab.sentinel()) {
      if (off + 1 != file_len)
        raise(errc::duplicate_sentinel,
              "sentinel at offset " + std::to_string(off) + " before end of input");
      *saw_final_sentinel = true;
    } else if (!ab.contains(s)) {
      raise(errc::invalid_symbol, "byte at offset " + std::to_string(off) +
                                      " is not in the alphabet");
    }
  }
}

void text_reader::init_ledger(memory_ledger* ledger) {
  ledger_ = ledger;
  if (is_file_) buffer_.reserve(block_size_);
  if (ledger_ && is_file_) ledger_->charge(mem_region::block_buffer, block_size_);
}

text_reader::~text_reader() {
  if (ledger_ && is_file_) ledger_->release(mem_region::block_buffer, block_size_);
}

text_reader::text_reader(text_reader&& o) noexcept { *this = std::move(o); }

text_reader& text_reader::operator=(text_reader&& o) noexcept {
  ab_ = o.ab_;
  path_ = std::move(o.path_);
  file_ = std::move(o.file_);
  is_file_ = o.is_file_;
  memory_ = std::move(o.memory_);
  n_plus_1_ = o.n_plus_1_;
  disk_len_ = o.disk_len_;
  sentinel_on_disk_ = o.sentinel_on_disk_;
  block_size_ = o.block_size_;
  buffer_ = std::move(o.buffer_);
  buffered_block_ = o.buffered_block_;
  file_pos_ = o.file_pos_;
  stats_ = o.stats_;
  block_trace = o.block_trace;
  ledger_ = o.ledger_;
  o.ledger_ = nullptr;  // ownership of the ledger charge moves along
  o.is_file_ = false;
  return *this;
}

std::string_view text_reader::fetch_block(std::uint64_t id) {
  std::uint64_t begin = id * block_size_;
  std::uint64_t m = std::min<std::uint64_t>(block_size_, n_plus_1_ - begin);
  if (!is_file_) return std::string_view(memory_).substr(begin, m);

  if (buffered_block_ == id) return std::string_view(buffer_);
  std::uint64_t disk_bytes = begin < disk_len_ ? std::min<std::uint64_t>(m, disk_len_ - begin) : 0;
  buffer_.resize(m);
  if (disk_bytes > 0) {
    if (file_pos_ != begin) {
      file_.clear();
      file_.seekg(static_cast<std::streamoff>(begin));
    }
    file_.read(buffer_.data(), static_cast<std::streamsize>(disk_bytes));
    if (!file_) raise(errc::io_failure, "short read on " + path_.string());
    file_pos_ = begin + disk_bytes;
  }
  if (m > disk_bytes) {
    // virtual sentinel occupies position n
    assert(m == disk_bytes + 1);
    buffer_[m - 1] = static_cast<char>(ab_->sentinel());
  }
  buffered_block_ = id;
  return std::string_view(buffer_);
}

void text_reader::read_range_into(std::uint64_t pos, std::uint64_t len, std::string& out) {
  if (pos >= n_plus_1_)
    raise(errc::out_of_range, "read at position " + std::to_string(pos) +
                                  " beyond text end " + std::to_string(n_plus_1_ - 1));
  std::uint64_t m = std::min(len, n_plus_1_ - pos);
  out.resize(m);
  std::uint64_t written = 0;
  while (written < m) {
    std::uint64_t at = pos + written;
    std::uint64_t id = at / block_size_;
    bool miss = is_file_ && buffered_block_ != id;
    std::string_view blk = fetch_block(id);
    if (miss) ++stats_.blocks_read;
    std::uint64_t in_block = at - id * block_size_;
    std::uint64_t take = std::min<std::uint64_t>(m - written, blk.size() - in_block);
    std::copy_n(blk.data() + in_block, take, out.data() + written);
    written += take;
  }
}

std::string text_reader::read_range(std::uint64_t pos, std::uint64_t len) {
  std::string out;
  read_range_into(pos, len, out);
  return out;
}

void text_reader::gather_ranges_into(std::span<const read_request> requests,
                                     bool skip_enabled, std::span<std::string> out) {
  if (requests.empty()) return;
  assert(out.size() >= requests.size());

  // preconditions: sorted, in range
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (i > 0 && requests[i].pos < requests[i - 1].pos)
      raise(errc::unsorted_requests, "gather requests must be sorted by position");
    if (requests[i].pos >= n_plus_1_)
      raise(errc::out_of_range,
            "gather request at position " + std::to_string(requests[i].pos));
  }

  // truncated payload lengths and needed block runs
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;  // [first,last] inclusive
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::uint64_t tlen = std::min(requests[i].len, n_plus_1_ - requests[i].pos);
    out[i].resize(tlen);
    if (tlen == 0) continue;
    std::uint64_t b0 = requests[i].pos / block_size_;
    std::uint64_t b1 = (requests[i].pos + tlen - 1) / block_size_;
    if (!runs.empty() && b0 <= runs.back().second + 1)
      runs.back().second = std::max(runs.back().second, b1);
    else
      runs.emplace_back(b0, b1);
  }
  ++stats_.passes;
  if (runs.empty()) return;  // all requests empty

  std::size_t first_pending = 0;
  auto fill_from_block = [&](std::uint64_t id) {
    std::string_view blk = fetch_block(id);
    ++stats_.blocks_read;
    if (block_trace) block_trace->push_back(id);
    std::uint64_t bs = id * block_size_;
    std::uint64_t be = bs + blk.size();
    while (first_pending < requests.size()) {
      std::uint64_t end = requests[first_pending].pos + out[first_pending].size();
      if (end > be && out[first_pending].size() > 0) break;
      if (requests[first_pending].pos >= be) break;
      ++first_pending;
    }
    for (std::size_t i = first_pending; i < requests.size() && requests[i].pos < be; ++i) {
      std::uint64_t p = requests[i].pos;
      std::uint64_t e = p + out[i].size();
      std::uint64_t lo = std::max(p, bs);
      std::uint64_t hi = std::min(e, be);
      if (lo < hi)
        std::copy_n(blk.data() + (lo - bs), hi - lo, out[i].data() + (lo - p));
    }
  };

  std::uint64_t cursor = 0;  // next block the head would reach sequentially
  for (const auto& run : runs) {
    if (run.first > cursor) {
      if (skip_enabled) {
        stats_.blocks_skipped += run.first - cursor;
        ++stats_.seeks;
      } else {
        for (std::uint64_t id = cursor; id < run.first; ++id) fill_from_block(id);
      }
    }
    for (std::uint64_t id = run.first; id <= run.second; ++id) fill_from_block(id);
    cursor = run.second + 1;
  }
  if (block_trace) block_trace->push_back(~0ull);
}

std::vector<std::string> text_reader::gather_ranges(std::span<const read_request> requests,
                                                    bool skip_enabled) {
  std::vector<std::string> out(requests.size());
  gather_ranges_into(requests, skip_enabled, out);
  return out;
}

void text_reader::for_each_block(
    const std::function<void(std::uint64_t, std::string_view)>& fn) {
  for (std::uint64_t id = 0; id < block_count(); ++id) {
    std::string_view blk = fetch_block(id);
    ++stats_.blocks_read;
    fn(id * block_size_, blk);
  }
}

}  // namespace era
