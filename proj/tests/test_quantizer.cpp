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
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "impactir/errors.hpp"
#include "impactir/quantizer.hpp"

using namespace impactir;

namespace {

ImpactCollection collection_of(std::initializer_list<double> scores) {
  ImpactCollection c;
  int i = 0;
  for (double s : scores) c.add({"d" + std::to_string(i++), {{"t", s}}});
  return c;
}

}  // namespace

TEST(Quantizer, FitTakesGlobalMaximum) {
  EXPECT_EQ(LinearQuantizer::fit(collection_of({1.0, 10.0}), 8).s_max(), 10.0);
  EXPECT_EQ(LinearQuantizer::fit(collection_of({3.5}), 8).s_max(), 3.5);
}

TEST(Quantizer, FitErrors) {
  EXPECT_THROW(LinearQuantizer::fit(collection_of({1.0}), 1), ConfigError);
  EXPECT_THROW(LinearQuantizer::fit(collection_of({1.0}), 17), ConfigError);
  EXPECT_THROW(LinearQuantizer::fit(ImpactCollection{}, 8), ConfigError);
  ImpactCollection only_empty_docs;
  only_empty_docs.add({"d", {}});
  EXPECT_THROW(LinearQuantizer::fit(only_empty_docs, 8), ConfigError);
  EXPECT_THROW(LinearQuantizer(8, 0.0), ConfigError);
  EXPECT_THROW(LinearQuantizer(8, std::numeric_limits<double>::infinity()), ConfigError);
}

TEST(Quantizer, WorkedExamples) {
  const LinearQuantizer q(8, 10.0);
  EXPECT_EQ(q.quantize(10.0), 255u);
  EXPECT_EQ(q.quantize(5.0), 128u);  // 127.5 rounds away from zero
  EXPECT_EQ(q.quantize(0.01), 1u);   // 0.255 rounds to 0, clamped up
}

TEST(Quantizer, DomainErrors) {
  const LinearQuantizer q(8, 10.0);
  EXPECT_THROW(q.quantize(0.0), DomainError);
  EXPECT_THROW(q.quantize(-1.0), DomainError);
  EXPECT_THROW(q.quantize(std::nan("")), DomainError);
}

TEST(Quantizer, AboveScaleSaturates) {
  const LinearQuantizer q(8, 10.0);
  EXPECT_EQ(q.quantize(10.02), 255u);
  EXPECT_EQ(q.quantize(1e9), 255u);
  EXPECT_EQ(LinearQuantizer(16, 1.0).quantize(1.0), 65535u);
  EXPECT_EQ(LinearQuantizer(2, 1.0).quantize(0.5), 2u);  // 1.5 -> 2
}

TEST(Quantizer, MonotoneRangeAndScaleFidelity) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> bits(2, 16);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20000; ++trial) {
    const int b = bits(rng);
    const double s_max = std::exp(unit(rng) * 20.0 - 10.0);
    const LinearQuantizer q(b, s_max);
    const double s1 = std::max(unit(rng), 1e-12) * s_max;
    const double s2 = std::max(unit(rng), 1e-12) * s_max;
    const auto q1 = q.quantize(s1);
    const auto q2 = q.quantize(s2);
    if (s1 <= s2) {
      EXPECT_LE(q1, q2) << b << " " << s_max << " " << s1 << " " << s2;
    } else {
      EXPECT_GE(q1, q2) << b << " " << s_max << " " << s1 << " " << s2;
    }
    EXPECT_GE(q1, 1u);
    EXPECT_LE(q1, q.max_level());
    EXPECT_LE(std::fabs(q.dequantize(q1) - s1), s_max / q.max_level() * (1 + 1e-12));
  }
}
