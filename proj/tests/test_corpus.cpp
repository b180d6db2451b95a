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

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "impactir/corpus.hpp"
#include "impactir/errors.hpp"
#include "test_support.hpp"

using namespace impactir;
using impactir::testing::TempDir;
using impactir::testing::write_file;

namespace {

Tokens sorted(Tokens t) {
  std::sort(t.begin(), t.end());
  return t;
}

std::string join(const Tokens &t) {
  std::string s;
  for (const auto &x : t) s += x + " ";
  return s;
}

}  // namespace

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, LowercaseAndPunctuation) {
  EXPECT_EQ(tokenize("The cat, the CAT!"), (Tokens{"the", "cat", "the", "cat"}));
}

TEST(Tokenize, Stemming) {
  TokenizerConfig c;
  c.stemming = true;
  EXPECT_EQ(tokenize("running", c), Tokens{"run"});
}

TEST(Tokenize, PunctuationOnlyIsEmpty) { EXPECT_TRUE(tokenize(" ,.;!? -- ").empty()); }

TEST(Tokenize, KeepPunctuationSplitsOnWhitespaceOnly) {
  TokenizerConfig c;
  c.strip_punctuation = false;
  EXPECT_EQ(tokenize("U.S.  e-mail\tX", c), (Tokens{"u.s.", "e-mail", "x"}));
}

TEST(Tokenize, Utf8BytesStayInsideTokens) {
  EXPECT_EQ(tokenize("Caf\xc3\xa9 na\xc3\xafve"), (Tokens{"caf\xc3\xa9", "na\xc3\xafve"}));
}

TEST(Tokenize, StopwordsMatchedBeforeStemming) {
  TokenizerConfig c;
  c.stemming = true;
  c.stopwords = std::unordered_set<std::string>{"the", "is"};
  EXPECT_EQ(tokenize("The dog IS running", c), (Tokens{"dog", "run"}));
}

TEST(Tokenize, NoLowercase) {
  TokenizerConfig c;
  c.lowercase = false;
  EXPECT_EQ(tokenize("Hello World", c), (Tokens{"Hello", "World"}));
}

TEST(Tokenize, IdempotentOnOwnOutput) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abcXYZ09 ,.!?-'\t\n";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 60);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    for (int i = len(rng); i > 0; --i) s.push_back(alphabet[pick(rng)]);
    const auto once = tokenize(s);
    EXPECT_EQ(tokenize(join(once)), once) << "input: " << s;
  }
}

TEST(Porter, ReferenceVocabulary) {
  // Expected stems come from an independent Porter implementation.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"caresses", "caress"},     {"ponies", "poni"},       {"ties", "ti"},
      {"caress", "caress"},       {"cats", "cat"},          {"feed", "feed"},
      {"agreed", "agre"},         {"plastered", "plaster"}, {"bled", "bled"},
      {"motoring", "motor"},      {"sing", "sing"},         {"conflated", "conflat"},
      {"troubled", "troubl"},     {"sized", "size"},        {"hopping", "hop"},
      {"tanned", "tan"},          {"falling", "fall"},      {"hissing", "hiss"},
      {"fizzed", "fizz"},         {"failing", "fail"},      {"filing", "file"},
      {"happy", "happi"},         {"sky", "sky"},           {"relational", "relat"},
      {"conditional", "condit"},  {"rational", "ration"},   {"valenci", "valenc"},
      {"hesitanci", "hesit"},     {"digitizer", "digit"},   {"conformabli", "conform"},
      {"radicalli", "radic"},     {"differentli", "differ"}, {"vileli", "vile"},
      {"analogousli", "analog"},  {"vietnamization", "vietnam"}, {"predication", "predic"},
      {"operator", "oper"},       {"feudalism", "feudal"},  {"decisiveness", "decis"},
      {"hopefulness", "hope"},    {"callousness", "callous"}, {"formaliti", "formal"},
      {"sensitiviti", "sensit"},  {"sensibiliti", "sensibl"}, {"triplicate", "triplic"},
      {"formative", "form"},      {"formalize", "formal"},  {"electriciti", "electr"},
      {"electrical", "electr"},   {"hopeful", "hope"},      {"goodness", "good"},
      {"revival", "reviv"},       {"allowance", "allow"},   {"inference", "infer"},
      {"airliner", "airlin"},     {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"},
      {"defensible", "defens"},   {"irritant", "irrit"},    {"replacement", "replac"},
      {"adjustment", "adjust"},   {"dependent", "depend"},  {"adoption", "adopt"},
      {"homologou", "homolog"},   {"communism", "commun"},  {"activate", "activ"},
      {"angulariti", "angular"},  {"homologous", "homolog"}, {"effective", "effect"},
      {"bowdlerize", "bowdler"},  {"probate", "probat"},    {"rate", "rate"},
      {"cease", "ceas"},          {"controll", "control"},  {"roll", "roll"},
      {"running", "run"},         {"generously", "gener"},  {"a", "a"},
      {"is", "is"},
  };
  for (const auto &[word, stem] : cases) EXPECT_EQ(porter_stem(word), stem) << word;
}

TEST(Porter, NonAlphabeticWordsUntouched) {
  EXPECT_EQ(porter_stem("2021s"), "2021s");
  EXPECT_EQ(porter_stem(""), "");
}

TEST(ClassifyExpansion, WorkedExamples) {
  auto s = classify_expansion_terms({"a", "b"}, {"b", "c", "b"});
  EXPECT_EQ(s.rewrite_terms, (Tokens{"b", "b"}));
  EXPECT_EQ(s.inject_terms, Tokens{"c"});

  s = classify_expansion_terms({"a"}, {});
  EXPECT_TRUE(s.rewrite_terms.empty());
  EXPECT_TRUE(s.inject_terms.empty());

  s = classify_expansion_terms({}, {"x"});
  EXPECT_TRUE(s.rewrite_terms.empty());
  EXPECT_EQ(s.inject_terms, Tokens{"x"});
}

TEST(MergeExpansion, WorkedExamples) {
  auto full = merge_expansion({"a", "b"}, {"b", "c"}, ExpansionMode::kFull);
  EXPECT_EQ(full.body_terms, (Tokens{"a", "b", "b"}));
  EXPECT_EQ(full.injected_terms, Tokens{"c"});

  auto none = merge_expansion({"a"}, {"x"}, ExpansionMode::kNone);
  EXPECT_EQ(none.body_terms, Tokens{"a"});
  EXPECT_TRUE(none.injected_terms.empty());

  auto inject = merge_expansion({"a", "b"}, {"b", "c"}, ExpansionMode::kInject);
  EXPECT_EQ(inject.body_terms, (Tokens{"a", "b"}));
  EXPECT_EQ(inject.injected_terms, Tokens{"c"});

  auto rewrite = merge_expansion({"a", "b"}, {"b", "c"}, ExpansionMode::kRewrite);
  EXPECT_EQ(rewrite.body_terms, (Tokens{"a", "b", "b"}));
  EXPECT_TRUE(rewrite.injected_terms.empty());
}

TEST(MergeExpansion, PartitionAndCompositionLaws) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<int> sym(0, 9);
  auto random_tokens = [&] {
    Tokens t;
    for (int i = len(rng); i > 0; --i) t.push_back("w" + std::to_string(sym(rng)));
    return t;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto body = random_tokens();
    const auto exp = random_tokens();
    const auto split = classify_expansion_terms(body, exp);

    Tokens both = split.rewrite_terms;
    both.insert(both.end(), split.inject_terms.begin(), split.inject_terms.end());
    EXPECT_EQ(sorted(both), sorted(exp));
    for (const auto &t : split.rewrite_terms) EXPECT_NE(std::find(body.begin(), body.end(), t), body.end());
    for (const auto &t : split.inject_terms) EXPECT_EQ(std::find(body.begin(), body.end(), t), body.end());

    const auto full = merge_expansion(body, exp, ExpansionMode::kFull);
    const auto rewrite = merge_expansion(body, exp, ExpansionMode::kRewrite);
    const auto inject = merge_expansion(body, exp, ExpansionMode::kInject);
    Tokens full_all = full.body_terms;
    full_all.insert(full_all.end(), full.injected_terms.begin(), full.injected_terms.end());
    Tokens composed = rewrite.body_terms;
    composed.insert(composed.end(), inject.injected_terms.begin(), inject.injected_terms.end());
    EXPECT_EQ(sorted(full_all), sorted(composed));
  }
}

TEST(ExpansionMode, ParseRoundTrip) {
  for (auto m : {ExpansionMode::kNone, ExpansionMode::kFull, ExpansionMode::kRewrite, ExpansionMode::kInject}) {
    EXPECT_EQ(parse_expansion_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_expansion_mode("both"), ConfigError);
}

TEST(CorpusFiles, ExpandCorpusConcatenatesQueries) {
  TempDir dir;
  write_file(dir / "corpus.tsv", "d1\tThe cat sat.\nd2\tA dog barked\n");
  write_file(dir / "exp.jsonl", R"({"id":"d1","queries":["cat food","where do cats sit"]})" "\n");
  const auto passages = expand_corpus(read_corpus_tsv(dir / "corpus.tsv"), read_expansions_jsonl(dir / "exp.jsonl"),
                                      ExpansionMode::kFull, {});
  ASSERT_EQ(passages.size(), 2u);
  EXPECT_EQ(passages[0].body_terms, (Tokens{"the", "cat", "sat", "cat"}));
  EXPECT_EQ(passages[0].injected_terms, (Tokens{"food", "where", "do", "cats", "sit"}));
  EXPECT_EQ(passages[1].body_terms, (Tokens{"a", "dog", "barked"}));
  EXPECT_TRUE(passages[1].injected_terms.empty());

  write_passages_tsv(dir / "passages.tsv", passages);
  EXPECT_EQ(read_passages_tsv(dir / "passages.tsv"), passages);
}

TEST(CorpusFiles, Errors) {
  TempDir dir;
  write_file(dir / "dup.tsv", "d1\tx\nd1\ty\n");
  EXPECT_THROW(read_corpus_tsv(dir / "dup.tsv"), DataError);

  write_file(dir / "notab.tsv", "d1 x\n");
  try {
    read_corpus_tsv(dir / "notab.tsv");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1u);
  }

  write_file(dir / "bad.jsonl", "{\"id\":\"d1\",\"queries\":[\"a\"]}\n{\"id\":\"d2\"}\n");
  try {
    read_expansions_jsonl(dir / "bad.jsonl");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }

  EXPECT_THROW(expand_corpus({{"d1", "x"}}, {{"zz", {"q"}}}, ExpansionMode::kFull, {}), DataError);
  EXPECT_THROW(read_corpus_tsv(dir / "missing.tsv"), IoError);
}

TEST(CorpusFiles, RawTwoColumnPassagesAreTokenized) {
  TempDir dir;
  write_file(dir / "raw.tsv", "d1\tHello, World\n");
  const auto p = read_passages_tsv(dir / "raw.tsv");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].body_terms, (Tokens{"hello", "world"}));
}
