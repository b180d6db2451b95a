// Copyright 2026 the impactir authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "impactir/index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>

#include "impactir/errors.hpp"
#include "text_io.hpp"

namespace impactir {

void encode_varbyte(std::uint64_t value, std::vector<std::uint8_t> &out) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value & 0x7F) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint64_t decode_varbyte(std::span<const std::uint8_t> bytes, std::size_t &pos) {
  std::uint64_t value = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= bytes.size()) throw FormatError("truncated varbyte sequence");
    const std::uint8_t byte = bytes[pos++];
    value |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) return value;
  }
  throw FormatError("overlong varbyte sequence");
}

// --- PostingCursor ---------------------------------------------------------

PostingCursor::PostingCursor(std::span<const std::uint8_t> doc_gaps, std::span<const std::uint8_t> impacts,
                             std::size_t size, int impact_width, std::uint32_t max_impact)
    : doc_gaps_(doc_gaps), impacts_(impacts), size_(size), impact_width_(impact_width), max_impact_(max_impact) {
  if (size_ > 0) {
    doc_ = 0;
    decode_current();
  }
}

void PostingCursor::decode_current() {
  // doc_ holds the previous ordinal; the first gap is the absolute ordinal.
  const auto gap = decode_varbyte(doc_gaps_, byte_pos_);
  doc_ = static_cast<DocOrdinal>(index_ == 0 ? gap : doc_ + gap);
}

std::uint32_t PostingCursor::impact() const {
  const std::size_t at = index_ * static_cast<std::size_t>(impact_width_);
  std::uint32_t v = impacts_[at];
  if (impact_width_ == 2) v |= static_cast<std::uint32_t>(impacts_[at + 1]) << 8;
  return v;
}

void PostingCursor::next() {
  if (doc_ == kEndOfList) return;
  if (++index_ >= size_) {
    doc_ = kEndOfList;
    return;
  }
  decode_current();
}

void PostingCursor::next_geq(DocOrdinal target) {
  while (doc_ < target) next();
}

// --- ImpactIndex -----------------------------------------------------------

ImpactIndex ImpactIndex::build(const ImpactCollection &collection, const LinearQuantizer &quantizer) {
  if (collection.doc_count() >= kEndOfList) throw ConfigError("too many documents for 32-bit ordinals");

  ImpactIndex index(quantizer);
  std::map<std::string_view, std::vector<Posting>> lists;
  const auto &docs = collection.documents();
  index.doc_table_.reserve(docs.size());
  for (std::size_t ord = 0; ord < docs.size(); ++ord) {
    index.doc_table_.push_back(docs[ord].doc_id);
    for (const auto &[term, score] : docs[ord].impacts) {
      lists[term].push_back({static_cast<DocOrdinal>(ord), quantizer.quantize(score)});
    }
  }

  const int width = index.impact_width();
  index.lexicon_.reserve(lists.size());
  for (const auto &[term, list] : lists) {
    TermInfo info;
    info.term = std::string(term);
    info.offset = index.postings_.size();
    info.doc_freq = static_cast<std::uint32_t>(list.size());
    DocOrdinal prev = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      encode_varbyte(i == 0 ? list[i].doc_ordinal : list[i].doc_ordinal - prev, index.postings_);
      prev = list[i].doc_ordinal;
      info.max_impact = std::max(info.max_impact, list[i].impact);
    }
    info.doc_bytes = index.postings_.size() - info.offset;
    for (const auto &p : list) {
      for (int b = 0; b < width; ++b) index.postings_.push_back(static_cast<std::uint8_t>(p.impact >> (8 * b)));
    }
    index.lexicon_.push_back(std::move(info));
  }
  return index;
}

std::optional<std::size_t> ImpactIndex::term_id(std::string_view term) const {
  const auto it = std::lower_bound(lexicon_.begin(), lexicon_.end(), term,
                                   [](const TermInfo &info, std::string_view t) { return info.term < t; });
  if (it == lexicon_.end() || it->term != term) return std::nullopt;
  return static_cast<std::size_t>(std::distance(lexicon_.begin(), it));
}

PostingCursor ImpactIndex::postings(std::size_t id) const {
  const auto &info = lexicon_.at(id);
  const std::span<const std::uint8_t> all(postings_);
  const auto impact_bytes = static_cast<std::size_t>(info.doc_freq) * static_cast<std::size_t>(impact_width());
  return PostingCursor(all.subspan(info.offset, info.doc_bytes), all.subspan(info.offset + info.doc_bytes, impact_bytes),
                       info.doc_freq, impact_width(), info.max_impact);
}

PostingCursor ImpactIndex::postings(std::string_view term) const {
  const auto id = term_id(term);
  return id ? postings(*id) : PostingCursor();
}

std::uint32_t ImpactIndex::term_max_impact(std::string_view term) const {
  const auto id = term_id(term);
  return id ? lexicon_[*id].max_impact : 0;
}

std::vector<Posting> ImpactIndex::decode_postings(std::string_view term) const {
  std::vector<Posting> out;
  for (auto cur = postings(term); !cur.exhausted(); cur.next()) out.push_back({cur.doc(), cur.impact()});
  return out;
}

std::size_t ImpactIndex::posting_count() const {
  std::size_t n = 0;
  for (const auto &info : lexicon_) n += info.doc_freq;
  return n;
}

// --- Serialization ---------------------------------------------------------

namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'M', 'P', 'X'};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class ByteWriter {
 public:
  template <typename T>
  void put(T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_string(std::string_view s) {
    put(static_cast<std::uint32_t>(s.size()));
    bytes.insert(bytes.end(), s.begin(), s.end());
  }

  std::vector<std::uint8_t> bytes;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(reinterpret_cast<const char *>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> get_bytes(std::uint64_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw FormatError("index file truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> ImpactIndex::serialize() const {
  ByteWriter w;
  w.bytes.insert(w.bytes.end(), std::begin(kMagic), std::end(kMagic));
  w.put(kFormatVersion);
  w.put(static_cast<std::uint32_t>(quantizer_.bits()));
  w.put_f64(quantizer_.s_max());
  w.put(static_cast<std::uint64_t>(doc_table_.size()));
  w.put(static_cast<std::uint64_t>(lexicon_.size()));
  for (const auto &info : lexicon_) {
    w.put_string(info.term);
    w.put(info.offset);
    w.put(info.doc_bytes);
    w.put(info.doc_freq);
    w.put(info.max_impact);
  }
  w.put(static_cast<std::uint64_t>(postings_.size()));
  w.bytes.insert(w.bytes.end(), postings_.begin(), postings_.end());
  for (const auto &id : doc_table_) w.put_string(id);
  w.put(fnv1a(w.bytes));
  return std::move(w.bytes);
}

ImpactIndex ImpactIndex::deserialize(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8 + 8 + 8;
  if (bytes.size() < kHeaderSize + 8 + 8) throw FormatError("index file truncated");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw FormatError("bad index magic");

  ByteReader r(bytes.subspan(4));
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw FormatError("index format version " + std::to_string(version) + " not supported (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  const auto body = bytes.first(bytes.size() - 8);
  ByteReader tail(bytes.subspan(bytes.size() - 8));
  if (fnv1a(body) != tail.get<std::uint64_t>()) throw FormatError("index checksum mismatch (corrupt or truncated file)");

  const auto bits = static_cast<int>(r.get<std::uint32_t>());
  const double s_max = r.get_f64();
  std::optional<LinearQuantizer> quantizer;
  try {
    quantizer.emplace(bits, s_max);
  } catch (const ConfigError &e) {
    throw FormatError(std::string("bad quantizer parameters in index header: ") + e.what());
  }
  ImpactIndex index(*quantizer);

  const auto doc_count = r.get<std::uint64_t>();
  const auto term_count = r.get<std::uint64_t>();
  if (doc_count >= kEndOfList) throw FormatError("document count out of range");
  // Each lexicon entry takes at least 28 bytes, each doc-table entry 4.
  if (term_count > r.remaining() / 28 || doc_count > r.remaining() / 4) throw FormatError("index file truncated");

  index.lexicon_.reserve(term_count);
  for (std::uint64_t i = 0; i < term_count; ++i) {
    TermInfo info;
    info.term = r.get_string();
    info.offset = r.get<std::uint64_t>();
    info.doc_bytes = r.get<std::uint64_t>();
    info.doc_freq = r.get<std::uint32_t>();
    info.max_impact = r.get<std::uint32_t>();
    if (!index.lexicon_.empty() && !(index.lexicon_.back().term < info.term)) {
      throw FormatError("lexicon not strictly sorted at entry " + std::to_string(i));
    }
    index.lexicon_.push_back(std::move(info));
  }
  const auto postings_size = r.get<std::uint64_t>();
  const auto postings = r.get_bytes(postings_size);
  index.postings_.assign(postings.begin(), postings.end());
  index.doc_table_.reserve(doc_count);
  for (std::uint64_t i = 0; i < doc_count; ++i) index.doc_table_.push_back(r.get_string());
  if (r.remaining() != 8) throw FormatError("unexpected trailing bytes in index file");

  // Validate every list so corrupt files fail here rather than mid-query.
  const auto width = static_cast<std::uint64_t>(index.impact_width());
  for (std::size_t id = 0; id < index.lexicon_.size(); ++id) {
    const auto &info = index.lexicon_[id];
    if (info.doc_freq == 0 || info.offset > postings_size || info.doc_bytes > postings_size - info.offset ||
        info.doc_freq * width > postings_size - info.offset - info.doc_bytes) {
      throw FormatError("postings bounds invalid for term '" + info.term + "'");
    }
    std::uint32_t seen_max = 0;
    DocOrdinal prev = 0;
    std::size_t n = 0;
    for (auto cur = index.postings(id); !cur.exhausted(); cur.next(), ++n) {
      if ((n > 0 && cur.doc() <= prev) || cur.doc() >= doc_count) {
        throw FormatError("postings for term '" + info.term + "' are out of order or out of range");
      }
      if (cur.impact() < 1 || cur.impact() > index.quantizer_.max_level()) {
        throw FormatError("impact out of range for term '" + info.term + "'");
      }
      seen_max = std::max(seen_max, cur.impact());
      prev = cur.doc();
    }
    if (seen_max != info.max_impact) throw FormatError("max impact mismatch for term '" + info.term + "'");
  }
  return index;
}

void ImpactIndex::save(const std::filesystem::path &path) const {
  const auto bytes = serialize();
  auto out = detail::open_output(path, true);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  detail::finish_output(out, path);
}

ImpactIndex ImpactIndex::load(const std::filesystem::path &path) {
  auto in = detail::open_input(path, true);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  try {
    return deserialize(bytes);
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace impactir
