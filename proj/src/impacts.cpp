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

#include "impactir/impacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "impactir/errors.hpp"
#include "text_io.hpp"

namespace impactir {

void ImpactCollection::add(DocumentImpacts doc) {
  if (doc.doc_id.empty()) throw DataError("empty doc_id");
  for (const auto &[term, score] : doc.impacts) {
    if (!(score > 0.0) || !std::isfinite(score)) {
      throw DataError("non-positive impact for term '" + term + "' in document '" + doc.doc_id + "'");
    }
  }
  if (!ids_.insert(doc.doc_id).second) throw DataError("duplicate doc_id '" + doc.doc_id + "'");
  docs_.push_back(std::move(doc));
}

std::size_t ImpactCollection::posting_count() const {
  std::size_t n = 0;
  for (const auto &d : docs_) n += d.impacts.size();
  return n;
}

std::set<std::string> ImpactCollection::vocabulary() const {
  std::set<std::string> vocab;
  for (const auto &d : docs_) {
    for (const auto &kv : d.impacts) vocab.insert(kv.first);
  }
  return vocab;
}

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
  const double n = static_cast<double>(doc_count);
  const double df = static_cast<double>(doc_freq);
  return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_tf(double tf, double doc_len, double avg_doc_len, const Bm25Params &params) {
  const double norm = params.k1 * (1.0 - params.b + params.b * doc_len / avg_doc_len);
  return tf * (params.k1 + 1.0) / (tf + norm);
}

ImpactCollection compute_bm25_impacts(const std::vector<Passage> &corpus, const Bm25Params &params,
                                      unsigned threads) {
  if (corpus.empty()) throw ConfigError("cannot compute BM25 impacts over an empty corpus");
  if (!(params.k1 > 0.0)) throw ConfigError("BM25 k1 must be > 0");
  if (!(params.b >= 0.0 && params.b <= 1.0)) throw ConfigError("BM25 b must lie in [0, 1]");

  // Sequential statistics pass.
  std::vector<std::unordered_map<std::string_view, std::uint32_t>> tfs(corpus.size());
  std::unordered_map<std::string_view, std::size_t> df;
  double total_len = 0.0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto &tf = tfs[i];
    for (const auto &t : corpus[i].body_terms) ++tf[t];
    for (const auto &t : corpus[i].injected_terms) ++tf[t];
    for (const auto &kv : tf) ++df[kv.first];
    total_len += static_cast<double>(corpus[i].body_terms.size() + corpus[i].injected_terms.size());
  }
  const double avg_len = total_len / static_cast<double>(corpus.size());

  std::vector<DocumentImpacts> docs(corpus.size());
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double len = static_cast<double>(corpus[i].body_terms.size() + corpus[i].injected_terms.size());
      docs[i].doc_id = corpus[i].doc_id;
      for (const auto &[term, tf] : tfs[i]) {
        docs[i].impacts.emplace(std::string(term), bm25_idf(corpus.size(), df.at(term)) *
                                                       bm25_tf(tf, len, avg_len, params));
      }
    }
  };

  threads = std::clamp<unsigned>(threads, 1, 64);
  if (threads == 1 || corpus.size() < 2 * threads) {
    score_range(0, corpus.size());
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (corpus.size() + threads - 1) / threads;
    for (std::size_t begin = 0; begin < corpus.size(); begin += chunk) {
      workers.emplace_back(score_range, begin, std::min(corpus.size(), begin + chunk));
    }
  }

  ImpactCollection out;
  for (auto &d : docs) out.add(std::move(d));
  return out;
}

namespace {

// Rejects repeated keys inside any JSON object; nlohmann keeps the last one silently.
class DuplicateKeyGuard {
 public:
  bool operator()(int /*depth*/, nlohmann::json::parse_event_t event, nlohmann::json &parsed) {
    using Event = nlohmann::json::parse_event_t;
    if (event == Event::object_start) {
      keys_.emplace_back();
    } else if (event == Event::object_end) {
      keys_.pop_back();
    } else if (event == Event::key) {
      const auto &key = parsed.get_ref<const std::string &>();
      if (!keys_.back().insert(key).second) duplicate_ = key;
    }
    return true;
  }

  const std::optional<std::string> &duplicate() const { return duplicate_; }

 private:
  std::vector<std::set<std::string>> keys_;
  std::optional<std::string> duplicate_;
};

}  // namespace

ImpactCollection load_impact_file(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  ImpactCollection out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;

    DocumentImpacts doc;
    try {
      DuplicateKeyGuard guard;
      const auto j = nlohmann::json::parse(line, std::ref(guard));
      if (guard.duplicate()) {
        throw ParseError("duplicate key '" + *guard.duplicate() + "' in " + path.string(), line_no);
      }
      doc.doc_id = j.at("id").get<std::string>();
      const auto &impacts = j.at("impacts");
      if (!impacts.is_object()) throw ParseError("'impacts' must be an object in " + path.string(), line_no);
      for (const auto &[term, score] : impacts.items()) {
        if (!score.is_number()) {
          throw ParseError("score for '" + term + "' is not a number in " + path.string(), line_no);
        }
        doc.impacts.emplace(term, score.get<double>());
      }
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string(e.what()) + " in " + path.string(), line_no);
    }

    try {
      out.add(std::move(doc));
    } catch (const DataError &e) {
      throw DataError(std::string(e.what()) + " at " + path.string() + ":" + std::to_string(line_no));
    }
  }
  return out;
}

std::string format_impact(double score) {
  double rounded = std::round(score * 1000.0) / 1000.0;
  if (score > 0.0 && rounded < 0.001) rounded = 0.001;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", rounded);
  return buf;
}

void write_impact_file(const std::filesystem::path &path, const ImpactCollection &collection) {
  auto out = detail::open_output(path);
  for (const auto &doc : collection.documents()) {
    out << "{\"id\":" << nlohmann::json(doc.doc_id).dump() << ",\"impacts\":{";
    bool first = true;
    for (const auto &[term, score] : doc.impacts) {
      if (!first) out << ',';
      first = false;
      out << nlohmann::json(term).dump() << ':' << format_impact(score);
    }
    out << "}}\n";
  }
  detail::finish_output(out, path);
}

}  // namespace impactir
