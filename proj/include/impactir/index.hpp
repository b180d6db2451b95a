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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impactir/impacts.hpp"
#include "impactir/quantizer.hpp"

namespace impactir {

using DocOrdinal = std::uint32_t;

inline constexpr DocOrdinal kEndOfList = std::numeric_limits<DocOrdinal>::max();

struct Posting {
  DocOrdinal doc_ordinal;
  std::uint32_t impact;

  bool operator==(const Posting &) const = default;
};

/// Variable-byte codec used for docid gaps: seven payload bits per byte,
/// least significant group first, high bit set on every byte except the last.
void encode_varbyte(std::uint64_t value, std::vector<std::uint8_t> &out);

/// Decodes one value starting at `pos` and advances it. Throws FormatError
/// on a truncated or overlong sequence.
std::uint64_t decode_varbyte(std::span<const std::uint8_t> bytes, std::size_t &pos);

/// Forward cursor over one compressed postings list. Decodes lazily; once
/// exhausted, doc() returns kEndOfList. Cursors hold per-query state and
/// must not be shared between queries.
class PostingCursor {
 public:
  PostingCursor() = default;
  PostingCursor(std::span<const std::uint8_t> doc_gaps, std::span<const std::uint8_t> impacts,
                std::size_t size, int impact_width, std::uint32_t max_impact);

  DocOrdinal doc() const { return doc_; }
  std::uint32_t impact() const;
  bool exhausted() const { return doc_ == kEndOfList; }

  void next();
  /// Moves to the first posting with doc_ordinal >= target. Never moves backwards.
  void next_geq(DocOrdinal target);

  std::size_t size() const { return size_; }
  std::uint32_t max_impact() const { return max_impact_; }

 private:
  void decode_current();

  std::span<const std::uint8_t> doc_gaps_;
  std::span<const std::uint8_t> impacts_;
  std::size_t size_ = 0;
  std::size_t index_ = 0;
  std::size_t byte_pos_ = 0;
  int impact_width_ = 1;
  std::uint32_t max_impact_ = 0;
  DocOrdinal doc_ = kEndOfList;
};

/// Lexicon entry. `offset` points into the postings block, where the list is
/// stored as `doc_bytes` of varbyte gaps followed by doc_freq fixed-width
/// little-endian impacts.
struct TermInfo {
  std::string term;
  std::uint64_t offset = 0;
  std::uint64_t doc_bytes = 0;
  std::uint32_t doc_freq = 0;
  std::uint32_t max_impact = 0;

  bool operator==(const TermInfo &) const = default;
};

/// Quantized impact inverted index. Immutable once built or loaded, so any
/// number of threads may query it concurrently.
///
/// File layout (all integers little-endian):
///
///   "IMPX" | u32 version | u32 bits | f64 s_max | u64 doc_count | u64 term_count
///   lexicon:  term_count x { u32 len, term bytes, u64 offset, u64 doc_bytes,
///                            u32 doc_freq, u32 max_impact }   (terms sorted bytewise)
///   postings: u64 byte_count, bytes
///   doc table: doc_count x { u32 len, doc_id bytes }
///   u64 FNV-1a checksum of everything above
class ImpactIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Ordinals follow collection order. Documents without impacts keep their slot.
  static ImpactIndex build(const ImpactCollection &collection, const LinearQuantizer &quantizer);

  void save(const std::filesystem::path &path) const;
  static ImpactIndex load(const std::filesystem::path &path);

  std::vector<std::uint8_t> serialize() const;
  static ImpactIndex deserialize(std::span<const std::uint8_t> bytes);

  /// Empty cursor for terms not in the lexicon.
  PostingCursor postings(std::string_view term) const;
  PostingCursor postings(std::size_t term_id) const;
  std::optional<std::size_t> term_id(std::string_view term) const;

  /// Zero for absent terms.
  std::uint32_t term_max_impact(std::string_view term) const;

  /// Fully decoded list, mainly for tests and tooling.
  std::vector<Posting> decode_postings(std::string_view term) const;

  const std::vector<TermInfo> &lexicon() const { return lexicon_; }
  const std::vector<std::string> &doc_table() const { return doc_table_; }
  std::size_t doc_count() const { return doc_table_.size(); }
  std::size_t term_count() const { return lexicon_.size(); }
  std::size_t posting_count() const;
  const LinearQuantizer &quantizer() const { return quantizer_; }
  int impact_width() const { return (quantizer_.bits() + 7) / 8; }

 private:
  explicit ImpactIndex(LinearQuantizer quantizer) : quantizer_(quantizer) {}

  LinearQuantizer quantizer_;
  std::vector<TermInfo> lexicon_;
  std::vector<std::uint8_t> postings_;
  std::vector<std::string> doc_table_;
};

}  // namespace impactir
