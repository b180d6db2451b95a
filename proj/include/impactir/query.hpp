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
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "impactir/corpus.hpp"
#include "impactir/index.hpp"

namespace impactir {

using Score = std::uint64_t;

struct Query {
  std::string query_id;
  Tokens terms;  // unique, first-occurrence order
};

/// Tokenizes `text` and drops repeated terms.
Query make_query(std::string query_id, std::string_view text, const TokenizerConfig &config = {});

struct Hit {
  std::string doc_id;
  DocOrdinal doc_ordinal;
  Score score;

  bool operator==(const Hit &) const = default;
};

/// Hits sorted by descending score, ties broken by ascending doc ordinal.
struct TopKResult {
  std::string query_id;
  std::vector<Hit> hits;
  std::size_t k_requested = 0;

  bool operator==(const TopKResult &) const = default;
};

enum class Strategy { kExhaustive, kMaxScore };

Strategy parse_strategy(std::string_view name);
std::string_view to_string(Strategy strategy);

/// Bounded min-heap keeping the k best (score, ordinal) pairs under the
/// result order.
class TopKHeap {
 public:
  explicit TopKHeap(std::size_t k);

  /// True when a document with this score and a larger ordinal than every
  /// document pushed so far could still enter. Used for pruning during
  /// ascending document-at-a-time traversal.
  bool would_enter(Score score) const { return entries_.size() < k_ || score > entries_.front().score; }

  /// Returns true if the entry was kept.
  bool push(DocOrdinal doc, Score score);

  /// Score of the current k-th entry, or 0 while the heap is not full.
  Score threshold() const { return entries_.size() < k_ ? 0 : entries_.front().score; }

  /// Entries in result order. Leaves the heap empty.
  std::vector<std::pair<DocOrdinal, Score>> take_sorted();

 private:
  struct Entry {
    DocOrdinal doc;
    Score score;
  };
  static bool ranks_before(const Entry &a, const Entry &b) {
    return a.score != b.score ? a.score > b.score : a.doc < b.doc;
  }

  std::size_t k_;
  std::vector<Entry> entries_;  // heap whose front is the worst kept entry
};

/// Documents whose evaluation MaxScore abandoned early. A test build can
/// re-score them to check the upper bounds were sound.
struct MaxScoreTrace {
  struct Pruned {
    DocOrdinal doc;
    Score partial_score;  // score accumulated before abandoning
    Score upper_bound;    // bound that failed to beat the threshold
    Score threshold;      // k-th score at the time
  };
  std::vector<Pruned> pruned;
  std::size_t documents_scored = 0;  // candidates fully evaluated
  std::size_t postings_touched = 0;  // essential postings consumed
};

/// Exhaustive document-at-a-time disjunctive evaluation: every document
/// matching at least one query term is fully scored.
TopKResult search_exhaustive(const ImpactIndex &index, const Query &query, std::size_t k);

/// MaxScore dynamic pruning. Returns exactly what search_exhaustive returns.
TopKResult search_maxscore(const ImpactIndex &index, const Query &query, std::size_t k,
                           MaxScoreTrace *trace = nullptr);

TopKResult search(const ImpactIndex &index, const Query &query, std::size_t k, Strategy strategy);

struct BatchResult {
  std::vector<TopKResult> results;  // same order as the input queries
  std::vector<double> latencies_ms;
};

/// Runs every query and times each search call on a monotonic clock.
BatchResult batch_search(const ImpactIndex &index, const std::vector<Query> &queries, std::size_t k,
                         Strategy strategy, unsigned threads = 1);

struct LatencySummary {
  std::size_t count = 0;
  double mean_ms = 0.0;  // MRT
  double p50_ms = 0.0;
  double p99_ms = 0.0;
};

/// Percentiles use the nearest-rank definition.
LatencySummary summarize_latencies(const std::vector<double> &latencies_ms);

/// Reads `query_id<TAB>text` lines.
std::vector<Query> read_queries_tsv(const std::filesystem::path &path, const TokenizerConfig &config = {});

/// TREC run lines: `query_id Q0 doc_id rank score run_tag`, rank from 1.
void write_trec_run(std::ostream &out, const std::vector<TopKResult> &results, std::string_view run_tag);
void write_trec_run(const std::filesystem::path &path, const std::vector<TopKResult> &results,
                    std::string_view run_tag);

}  // namespace impactir
