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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "impactir/errors.hpp"
#include "impactir/impacts.hpp"
#include "test_support.hpp"

using namespace impactir;
using impactir::testing::TempDir;
using impactir::testing::write_file;

namespace {

// Scalar BM25 written out longhand, independent of the library helpers.
double bm25_by_hand(double tf, double doc_len, double avg_len, double n, double df, double k1 = 0.9, double b = 0.4) {
  const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
  return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avg_len));
}

Passage passage(std::string id, Tokens body, Tokens injected = {}) {
  return {std::move(id), std::move(body), std::move(injected)};
}

}  // namespace

TEST(Bm25, WorkedExample) {
  const auto c = compute_bm25_impacts({passage("d1", {"a", "b"}), passage("d2", {"a"})});
  ASSERT_EQ(c.doc_count(), 2u);
  const auto &d1 = c.documents()[0].impacts;
  const auto &d2 = c.documents()[1].impacts;
  // N=2, avgdl=1.5; frozen from a scalar evaluation outside this code base.
  EXPECT_NEAR(d1.at("b"), 0.651970120328661, 1e-12);
  EXPECT_NEAR(d1.at("a"), 0.171490573222037, 1e-12);
  EXPECT_NEAR(d2.at("a"), 0.194612897701412, 1e-12);
  EXPECT_NEAR(d1.at("b"), bm25_by_hand(1, 2, 1.5, 2, 1), 1e-12);
  EXPECT_EQ(d2.size(), 1u);
}

TEST(Bm25, InjectedTermsCountTowardsFrequencyAndLength) {
  const auto c = compute_bm25_impacts({passage("d1", {"a"}, {"a", "z"}), passage("d2", {"q"})});
  // d1 has |d| = 3, tf(a) = 2; avgdl = 2
  EXPECT_NEAR(c.documents()[0].impacts.at("a"), bm25_by_hand(2, 3, 2, 2, 1), 1e-12);
  EXPECT_NEAR(c.documents()[0].impacts.at("z"), bm25_by_hand(1, 3, 2, 2, 1), 1e-12);
}

TEST(Bm25, SaturatesBelowIdfTimesK1PlusOne) {
  const double idf = bm25_idf(10, 3);
  double prev = 0.0;
  for (double tf : {1.0, 10.0, 100.0, 1e4, 1e7}) {
    const double v = idf * bm25_tf(tf, 5.0, 5.0, {});
    EXPECT_LT(v, idf * 1.9);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(prev, idf * 1.9, 1e-5);
}

TEST(Bm25, MonotoneInTfAndDecreasingInDf) {
  for (double len : {1.0, 4.0, 20.0}) {
    for (double tf = 1; tf < 50; ++tf) {
      EXPECT_LE(bm25_tf(tf, len, 7.0, {}), bm25_tf(tf + 1, len, 7.0, {}));
    }
  }
  for (std::size_t df = 1; df < 100; ++df) {
    EXPECT_GT(bm25_idf(100, df), bm25_idf(100, df + 1));
    EXPECT_GT(bm25_idf(100, df + 1), 0.0);
  }
}

TEST(Bm25, IndependentOfThreadCount) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> sym(0, 40), len(0, 30);
  std::vector<Passage> corpus;
  for (int d = 0; d < 300; ++d) {
    Passage p{"d" + std::to_string(d), {}, {}};
    for (int i = len(rng); i > 0; --i) p.body_terms.push_back("w" + std::to_string(sym(rng)));
    for (int i = len(rng) / 3; i > 0; --i) p.injected_terms.push_back("x" + std::to_string(sym(rng)));
    corpus.push_back(std::move(p));
  }
  const auto one = compute_bm25_impacts(corpus, {}, 1);
  const auto many = compute_bm25_impacts(corpus, {}, 7);
  EXPECT_EQ(one.documents(), many.documents());
}

TEST(Bm25, Errors) {
  EXPECT_THROW(compute_bm25_impacts({}), ConfigError);
  EXPECT_THROW(compute_bm25_impacts({passage("d", {"a"})}, {0.0, 0.4}), ConfigError);
  EXPECT_THROW(compute_bm25_impacts({passage("d", {"a"})}, {0.9, 1.5}), ConfigError);
}

TEST(Bm25, EmptyDocumentKeepsItsSlot) {
  const auto c = compute_bm25_impacts({passage("d1", {}), passage("d2", {"a"})});
  ASSERT_EQ(c.doc_count(), 2u);
  EXPECT_TRUE(c.documents()[0].impacts.empty());
}

TEST(ImpactFile, LoadsExactly) {
  TempDir dir;
  write_file(dir / "i.jsonl", "{\"id\":\"d1\",\"impacts\":{\"cat\":1.250}}\n\n{\"id\":\"d2\",\"impacts\":{\"dog\":0.5,\"cat\":3}}\n");
  const auto c = load_impact_file(dir / "i.jsonl");
  ASSERT_EQ(c.doc_count(), 2u);
  EXPECT_EQ(c.documents()[0].doc_id, "d1");
  EXPECT_EQ(c.documents()[0].impacts.at("cat"), 1.25);
  EXPECT_EQ(c.vocabulary(), (std::set<std::string>{"cat", "dog"}));
  EXPECT_EQ(c.posting_count(), 3u);
}

TEST(ImpactFile, Errors) {
  TempDir dir;
  write_file(dir / "dupterm.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":1.0,\"a\":2.0}}\n");
  EXPECT_THROW(load_impact_file(dir / "dupterm.jsonl"), ParseError);

  write_file(dir / "dupdoc.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":1.0}}\n{\"id\":\"d1\",\"impacts\":{}}\n");
  EXPECT_THROW(load_impact_file(dir / "dupdoc.jsonl"), DataError);

  write_file(dir / "zero.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":0.000}}\n");
  EXPECT_THROW(load_impact_file(dir / "zero.jsonl"), DataError);

  write_file(dir / "neg.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":-1}}\n");
  EXPECT_THROW(load_impact_file(dir / "neg.jsonl"), DataError);

  write_file(dir / "broken.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":1}}\n{\"id\":\"d2\",\"impacts\":{\"a\":}\n");
  try {
    load_impact_file(dir / "broken.jsonl");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }

  write_file(dir / "str.jsonl", "{\"id\":\"d1\",\"impacts\":{\"a\":\"1.0\"}}\n");
  EXPECT_THROW(load_impact_file(dir / "str.jsonl"), ParseError);
  EXPECT_THROW(load_impact_file(dir / "absent.jsonl"), IoError);
}

TEST(ImpactFile, ThreeDecimalFormatting) {
  EXPECT_EQ(format_impact(1.25), "1.250");
  EXPECT_EQ(format_impact(1.23456), "1.235");
  EXPECT_EQ(format_impact(2.0005000001), "2.001");
  EXPECT_EQ(format_impact(0.0001), "0.001");
  EXPECT_EQ(format_impact(12.0), "12.000");
}

TEST(ImpactFile, WriteLoadIsIdentityUpToRounding) {
  std::mt19937_64 rng(5);
  const auto c = impactir::testing::random_collection(rng, {50, 40, 0.2, impactir::testing::ImpactShape::kSkewed});
  TempDir dir;
  write_impact_file(dir / "c.jsonl", c);
  const auto back = load_impact_file(dir / "c.jsonl");
  ASSERT_EQ(back.doc_count(), c.doc_count());
  for (std::size_t d = 0; d < c.doc_count(); ++d) {
    const auto &a = c.documents()[d];
    const auto &b = back.documents()[d];
    EXPECT_EQ(a.doc_id, b.doc_id);
    ASSERT_EQ(a.impacts.size(), b.impacts.size());
    for (const auto &[term, score] : a.impacts) EXPECT_NEAR(b.impacts.at(term), score, 0.0005 + 1e-12);
  }
  // A second write of the loaded collection is a fixed point.
  write_impact_file(dir / "c2.jsonl", back);
  EXPECT_EQ(impactir::testing::read_file(dir / "c.jsonl"), impactir::testing::read_file(dir / "c2.jsonl"));
}

TEST(ImpactFile, EscapesTermsAsJson) {
  ImpactCollection c;
  c.add({"d\"1", {{"quo\"te", 1.0}, {"back\\slash", 2.0}}});
  TempDir dir;
  write_impact_file(dir / "e.jsonl", c);
  EXPECT_EQ(load_impact_file(dir / "e.jsonl").documents(), c.documents());
}
