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
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "impactir/corpus.hpp"

namespace impactir {

/// Term -> impact for one document. Every score is strictly positive.
struct DocumentImpacts {
  std::string doc_id;
  std::map<std::string, double> impacts;

  bool operator==(const DocumentImpacts &) const = default;
};

/// Documents in corpus order. Order matters: it fixes index ordinals.
class ImpactCollection {
 public:
  ImpactCollection() = default;

  /// Throws DataError on a duplicate doc_id or a non-positive score.
  void add(DocumentImpacts doc);

  const std::vector<DocumentImpacts> &documents() const { return docs_; }
  std::size_t doc_count() const { return docs_.size(); }
  std::size_t posting_count() const;
  std::set<std::string> vocabulary() const;
  bool empty() const { return docs_.empty(); }

 private:
  std::vector<DocumentImpacts> docs_;
  std::set<std::string, std::less<>> ids_;
};

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

/// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), always > 0.
double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

/// Saturated term-frequency component tf*(k1+1) / (tf + k1*(1 - b + b*len/avg_len)).
double bm25_tf(double tf, double doc_len, double avg_doc_len, const Bm25Params &params);

/// BM25 term weights with the query-side factor fixed at 1, computed over
/// body and injected terms together. `threads` only splits the per-document
/// pass; the result does not depend on it.
ImpactCollection compute_bm25_impacts(const std::vector<Passage> &corpus, const Bm25Params &params = {},
                                      unsigned threads = 1);

/// Reads JSON-lines `{"id": ..., "impacts": {term: score, ...}}`. Scores are
/// taken exactly as written.
ImpactCollection load_impact_file(const std::filesystem::path &path);

/// Writes the same format with every score printed with exactly three
/// fractional digits (rounded half away from zero). Positive scores that
/// would print as 0.000 are written as 0.001 so the file stays loadable.
void write_impact_file(const std::filesystem::path &path, const ImpactCollection &collection);

/// Score rendering used by write_impact_file.
std::string format_impact(double score);

}  // namespace impactir
