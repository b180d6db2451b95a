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

#include "impactir/query.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "impactir/errors.hpp"
#include "text_io.hpp"

namespace impactir {

Query make_query(std::string query_id, std::string_view text, const TokenizerConfig &config) {
  Query q{std::move(query_id), {}};
  std::unordered_set<std::string> seen;
  for (auto &t : tokenize(text, config)) {
    if (seen.insert(t).second) q.terms.push_back(std::move(t));
  }
  return q;
}

Strategy parse_strategy(std::string_view name) {
  if (name == "exhaustive") return Strategy::kExhaustive;
  if (name == "maxscore") return Strategy::kMaxScore;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::kExhaustive ? "exhaustive" : "maxscore";
}

// --- TopKHeap --------------------------------------------------------------

TopKHeap::TopKHeap(std::size_t k) : k_(k) {
  if (k == 0) throw ConfigError("k must be >= 1");
  entries_.reserve(std::min<std::size_t>(k, 1 << 16));
}

bool TopKHeap::push(DocOrdinal doc, Score score) {
  const Entry e{doc, score};
  if (entries_.size() < k_) {
    entries_.push_back(e);
    std::push_heap(entries_.begin(), entries_.end(), ranks_before);
    return true;
  }
  if (!ranks_before(e, entries_.front())) return false;
  std::pop_heap(entries_.begin(), entries_.end(), ranks_before);
  entries_.back() = e;
  std::push_heap(entries_.begin(), entries_.end(), ranks_before);
  return true;
}

std::vector<std::pair<DocOrdinal, Score>> TopKHeap::take_sorted() {
  std::sort(entries_.begin(), entries_.end(), ranks_before);
  std::vector<std::pair<DocOrdinal, Score>> out;
  out.reserve(entries_.size());
  for (const auto &e : entries_) out.emplace_back(e.doc, e.score);
  entries_.clear();
  return out;
}

// --- Search ----------------------------------------------------------------

namespace {

// Cursors for the distinct query terms present in the lexicon.
std::vector<PostingCursor> open_cursors(const ImpactIndex &index, const Query &query) {
  std::vector<std::size_t> ids;
  for (const auto &term : query.terms) {
    if (const auto id = index.term_id(term)) ids.push_back(*id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<PostingCursor> cursors;
  cursors.reserve(ids.size());
  for (const auto id : ids) cursors.push_back(index.postings(id));
  return cursors;
}

TopKResult finish(const ImpactIndex &index, const Query &query, std::size_t k, TopKHeap &heap) {
  TopKResult result{query.query_id, {}, k};
  for (const auto &[doc, score] : heap.take_sorted()) result.hits.push_back({index.doc_table()[doc], doc, score});
  return result;
}

DocOrdinal min_doc(const std::vector<PostingCursor> &cursors) {
  DocOrdinal d = kEndOfList;
  for (const auto &c : cursors) d = std::min(d, c.doc());
  return d;
}

}  // namespace

TopKResult search_exhaustive(const ImpactIndex &index, const Query &query, std::size_t k) {
  TopKHeap heap(k);
  auto cursors = open_cursors(index, query);
  for (DocOrdinal doc = min_doc(cursors); doc != kEndOfList;) {
    Score score = 0;
    DocOrdinal next = kEndOfList;
    for (auto &c : cursors) {
      if (c.doc() == doc) {
        score += c.impact();
        c.next();
      }
      next = std::min(next, c.doc());
    }
    heap.push(doc, score);
    doc = next;
  }
  return finish(index, query, k, heap);
}

TopKResult search_maxscore(const ImpactIndex &index, const Query &query, std::size_t k, MaxScoreTrace *trace) {
  TopKHeap heap(k);
  auto cursors = open_cursors(index, query);
  // Ascending upper bound; the cheapest lists become non-essential first.
  std::stable_sort(cursors.begin(), cursors.end(),
                   [](const PostingCursor &a, const PostingCursor &b) { return a.max_impact() < b.max_impact(); });

  // bounds[i] = sum of max impacts of lists 0..i
  const std::size_t n = cursors.size();
  std::vector<Score> bounds(n);
  Score acc = 0;
  for (std::size_t i = 0; i < n; ++i) bounds[i] = acc += cursors[i].max_impact();

  std::size_t non_essential = 0;
  DocOrdinal doc = min_doc(cursors);
  while (non_essential < n && doc != kEndOfList) {
    Score score = 0;
    DocOrdinal next = kEndOfList;
    for (std::size_t i = non_essential; i < n; ++i) {
      auto &c = cursors[i];
      if (c.doc() == doc) {
        score += c.impact();
        c.next();
        if (trace) ++trace->postings_touched;
      }
      next = std::min(next, c.doc());
    }

    bool complete = true;
    for (std::size_t i = non_essential; i-- > 0;) {
      if (!heap.would_enter(score + bounds[i])) {
        if (trace) trace->pruned.push_back({doc, score, score + bounds[i], heap.threshold()});
        complete = false;
        break;
      }
      auto &c = cursors[i];
      c.next_geq(doc);
      if (c.doc() == doc) score += c.impact();
    }

    if (complete) {
      if (trace) ++trace->documents_scored;
      if (heap.push(doc, score)) {
        while (non_essential < n && !heap.would_enter(bounds[non_essential])) ++non_essential;
      }
    }
    doc = next;
  }
  return finish(index, query, k, heap);
}

TopKResult search(const ImpactIndex &index, const Query &query, std::size_t k, Strategy strategy) {
  return strategy == Strategy::kExhaustive ? search_exhaustive(index, query, k) : search_maxscore(index, query, k);
}

BatchResult batch_search(const ImpactIndex &index, const std::vector<Query> &queries, std::size_t k,
                         Strategy strategy, unsigned threads) {
  if (k == 0) throw ConfigError("k must be >= 1");
  BatchResult out;
  out.results.resize(queries.size());
  out.latencies_ms.resize(queries.size());

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto start = std::chrono::steady_clock::now();
      auto result = search(index, queries[i], k, strategy);
      const auto stop = std::chrono::steady_clock::now();
      out.results[i] = std::move(result);
      out.latencies_ms[i] = std::chrono::duration<double, std::milli>(stop - start).count();
    }
  };

  threads = std::clamp<unsigned>(threads, 1, 64);
  if (threads == 1 || queries.size() < 2) {
    run_range(0, queries.size());
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (queries.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < queries.size(); begin += chunk) {
      workers.emplace_back(run_range, begin, std::min(queries.size(), begin + chunk));
    }
  }
  return out;
}

LatencySummary summarize_latencies(const std::vector<double> &latencies_ms) {
  LatencySummary s;
  s.count = latencies_ms.size();
  if (s.count == 0) return s;
  s.mean_ms = std::accumulate(latencies_ms.begin(), latencies_ms.end(), 0.0) / static_cast<double>(s.count);
  auto sorted = latencies_ms;
  std::sort(sorted.begin(), sorted.end());
  auto nearest_rank = [&](double p) {
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(s.count)));
    return sorted[std::clamp<std::size_t>(rank, 1, s.count) - 1];
  };
  s.p50_ms = nearest_rank(50.0);
  s.p99_ms = nearest_rank(99.0);
  return s;
}

std::vector<Query> read_queries_tsv(const std::filesystem::path &path, const TokenizerConfig &config) {
  auto in = detail::open_input(path);
  std::vector<Query> queries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected query_id<TAB>text in " + path.string(), line_no);
    auto id = line.substr(0, tab);
    if (id.empty()) throw ParseError("empty query_id in " + path.string(), line_no);
    if (!seen.insert(id).second) {
      throw DataError("duplicate query_id '" + id + "' in " + path.string() + " at line " + std::to_string(line_no));
    }
    queries.push_back(make_query(std::move(id), std::string_view(line).substr(tab + 1), config));
  }
  return queries;
}

void write_trec_run(std::ostream &out, const std::vector<TopKResult> &results, std::string_view run_tag) {
  for (const auto &r : results) {
    std::size_t rank = 1;
    for (const auto &h : r.hits) {
      out << r.query_id << " Q0 " << h.doc_id << ' ' << rank++ << ' ' << h.score << ' ' << run_tag << '\n';
    }
  }
}

void write_trec_run(const std::filesystem::path &path, const std::vector<TopKResult> &results,
                    std::string_view run_tag) {
  auto out = detail::open_output(path);
  write_trec_run(out, results, run_tag);
  detail::finish_output(out, path);
}

}  // namespace impactir
