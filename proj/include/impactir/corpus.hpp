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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace impactir {

using Tokens = std::vector<std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool stemming = false;  // Porter stemmer
  std::optional<std::unordered_set<std::string>> stopwords;
};

/// Splits on whitespace, and on ASCII punctuation when strip_punctuation is
/// set. Bytes >= 0x80 are kept as token characters so UTF-8 words survive
/// intact. Stopwords are matched after case folding and before stemming.
Tokens tokenize(std::string_view text, const TokenizerConfig &config = {});

/// Classic Porter (1980) suffix stripping on a lowercase ASCII word.
std::string porter_stem(std::string_view word);

enum class ExpansionMode { kNone, kFull, kRewrite, kInject };

ExpansionMode parse_expansion_mode(std::string_view name);
std::string_view to_string(ExpansionMode mode);

/// A document after expansion. body_terms holds the original text plus any
/// rewrite-class expansion terms; injected_terms holds terms new to the
/// document and sits on the far side of the separator.
struct Passage {
  std::string doc_id;
  Tokens body_terms;
  Tokens injected_terms;

  bool operator==(const Passage &) const = default;
};

struct ExpansionSplit {
  Tokens rewrite_terms;
  Tokens inject_terms;
};

/// Partitions expansion tokens by membership in the body. Order and
/// duplicates are preserved within each class.
ExpansionSplit classify_expansion_terms(const Tokens &body_terms, const Tokens &expansion_terms);

struct PassageTerms {
  Tokens body_terms;
  Tokens injected_terms;
};

PassageTerms merge_expansion(const Tokens &body_terms, const Tokens &expansion_terms,
                             ExpansionMode mode);

struct RawDocument {
  std::string doc_id;
  std::string text;
};

/// Reads `doc_id<TAB>text` lines. Empty lines are skipped; doc ids must be
/// unique and non-empty.
std::vector<RawDocument> read_corpus_tsv(const std::filesystem::path &path);

struct ExpansionRecord {
  std::string doc_id;
  std::vector<std::string> queries;
};

/// Reads JSON-lines `{"id": ..., "queries": [...]}`.
std::vector<ExpansionRecord> read_expansions_jsonl(const std::filesystem::path &path);

/// Tokenizes the corpus and its predicted queries with one config and merges
/// them per `mode`. All queries of a document form one concatenated stream.
/// Documents without an expansion record are left unexpanded; expansion
/// records for unknown documents are a DataError.
std::vector<Passage> expand_corpus(const std::vector<RawDocument> &docs,
                                   const std::vector<ExpansionRecord> &expansions,
                                   ExpansionMode mode, const TokenizerConfig &config);

/// Passage file: `doc_id<TAB>body tokens<TAB>injected tokens`, tokens
/// separated by single spaces.
void write_passages_tsv(const std::filesystem::path &path, const std::vector<Passage> &passages);

/// Reads a passage file. Two-column lines are treated as raw corpus text and
/// tokenized with `config`; three-column lines are taken as pre-tokenized.
std::vector<Passage> read_passages_tsv(const std::filesystem::path &path,
                                       const TokenizerConfig &config = {});

}  // namespace impactir
