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

#include "impactir/corpus.hpp"

#include <fstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "impactir/errors.hpp"
#include "text_io.hpp"

namespace impactir {

namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_separator(unsigned char c, bool strip_punctuation) {
  if (is_space(c)) return true;
  if (!strip_punctuation || c >= 0x80) return false;
  return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'));
}

void emit(std::string token, const TokenizerConfig &config, Tokens &out) {
  if (config.lowercase) {
    for (char &c : token) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  if (config.stopwords && config.stopwords->contains(token)) return;
  if (config.stemming) token = porter_stem(token);
  if (!token.empty()) out.push_back(std::move(token));
}

std::string join(const Tokens &tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace

Tokens tokenize(std::string_view text, const TokenizerConfig &config) {
  Tokens out;
  std::string current;
  for (const char ch : text) {
    if (is_separator(static_cast<unsigned char>(ch), config.strip_punctuation)) {
      if (!current.empty()) emit(std::exchange(current, {}), config, out);
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) emit(std::move(current), config, out);
  return out;
}

ExpansionMode parse_expansion_mode(std::string_view name) {
  if (name == "none") return ExpansionMode::kNone;
  if (name == "full") return ExpansionMode::kFull;
  if (name == "rewrite") return ExpansionMode::kRewrite;
  if (name == "inject") return ExpansionMode::kInject;
  throw ConfigError("unknown expansion mode '" + std::string(name) + "'");
}

std::string_view to_string(ExpansionMode mode) {
  switch (mode) {
    case ExpansionMode::kNone:
      return "none";
    case ExpansionMode::kFull:
      return "full";
    case ExpansionMode::kRewrite:
      return "rewrite";
    case ExpansionMode::kInject:
      return "inject";
  }
  return "none";
}

ExpansionSplit classify_expansion_terms(const Tokens &body_terms, const Tokens &expansion_terms) {
  const std::unordered_set<std::string_view> body(body_terms.begin(), body_terms.end());
  ExpansionSplit split;
  for (const auto &term : expansion_terms) {
    (body.contains(term) ? split.rewrite_terms : split.inject_terms).push_back(term);
  }
  return split;
}

PassageTerms merge_expansion(const Tokens &body_terms, const Tokens &expansion_terms,
                             ExpansionMode mode) {
  PassageTerms out{body_terms, {}};
  if (mode == ExpansionMode::kNone) return out;

  auto split = classify_expansion_terms(body_terms, expansion_terms);
  if (mode == ExpansionMode::kFull || mode == ExpansionMode::kRewrite) {
    out.body_terms.insert(out.body_terms.end(), split.rewrite_terms.begin(),
                          split.rewrite_terms.end());
  }
  if (mode == ExpansionMode::kFull || mode == ExpansionMode::kInject) {
    out.injected_terms = std::move(split.inject_terms);
  }
  return out;
}

std::vector<RawDocument> read_corpus_tsv(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  std::vector<RawDocument> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected doc_id<TAB>text in " + path.string(), line_no);
    RawDocument doc{line.substr(0, tab), line.substr(tab + 1)};
    if (doc.doc_id.empty()) throw ParseError("empty doc_id in " + path.string(), line_no);
    if (!seen.insert(doc.doc_id).second) {
      throw DataError("duplicate doc_id '" + doc.doc_id + "' in " + path.string() + " at line " +
                      std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<ExpansionRecord> read_expansions_jsonl(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  std::vector<ExpansionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ExpansionRecord rec;
      rec.doc_id = j.at("id").get<std::string>();
      rec.queries = j.at("queries").get<std::vector<std::string>>();
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string(e.what()) + " in " + path.string(), line_no);
    }
  }
  return records;
}

std::vector<Passage> expand_corpus(const std::vector<RawDocument> &docs,
                                   const std::vector<ExpansionRecord> &expansions,
                                   ExpansionMode mode, const TokenizerConfig &config) {
  std::unordered_map<std::string_view, std::size_t> ordinal;
  for (std::size_t i = 0; i < docs.size(); ++i) ordinal.emplace(docs[i].doc_id, i);

  std::vector<Tokens> expansion_terms(docs.size());
  for (const auto &rec : expansions) {
    const auto it = ordinal.find(rec.doc_id);
    if (it == ordinal.end()) throw DataError("expansion for unknown doc_id '" + rec.doc_id + "'");
    auto &dest = expansion_terms[it->second];
    for (const auto &q : rec.queries) {
      auto toks = tokenize(q, config);
      dest.insert(dest.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
    }
  }

  std::vector<Passage> passages;
  passages.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto merged = merge_expansion(tokenize(docs[i].text, config), expansion_terms[i], mode);
    passages.push_back({docs[i].doc_id, std::move(merged.body_terms), std::move(merged.injected_terms)});
  }
  return passages;
}

void write_passages_tsv(const std::filesystem::path &path, const std::vector<Passage> &passages) {
  auto out = detail::open_output(path);
  for (const auto &p : passages) {
    out << p.doc_id << '\t' << join(p.body_terms) << '\t' << join(p.injected_terms) << '\n';
  }
  detail::finish_output(out, path);
}

std::vector<Passage> read_passages_tsv(const std::filesystem::path &path, const TokenizerConfig &config) {
  auto in = detail::open_input(path);
  std::vector<Passage> passages;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  const TokenizerConfig whitespace_only{false, false, false, std::nullopt};
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError("expected 2 or 3 tab-separated fields in " + path.string(), line_no);
    }
    Passage p;
    p.doc_id = std::string(fields[0]);
    if (p.doc_id.empty()) throw ParseError("empty doc_id in " + path.string(), line_no);
    if (fields.size() == 2) {
      p.body_terms = tokenize(fields[1], config);
    } else {
      p.body_terms = tokenize(fields[1], whitespace_only);
      p.injected_terms = tokenize(fields[2], whitespace_only);
    }
    if (!seen.insert(p.doc_id).second) {
      throw DataError("duplicate doc_id '" + p.doc_id + "' in " + path.string() + " at line " +
                      std::to_string(line_no));
    }
    passages.push_back(std::move(p));
  }
  return passages;
}

}  // namespace impactir
