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

#include <cstdint>

#include "impactir/impacts.hpp"

namespace impactir {

/// Global linear quantizer mapping positive scores onto [1, 2^bits - 1]:
///
///   q(s) = clamp(round_half_away(s / s_max * (2^bits - 1)), 1, 2^bits - 1)
///
/// Scores above s_max saturate at the top level.
class LinearQuantizer {
 public:
  static constexpr int kMinBits = 2;
  static constexpr int kMaxBits = 16;

  /// Throws ConfigError unless bits is in [2, 16] and s_max is finite and > 0.
  LinearQuantizer(int bits, double s_max);

  /// s_max is the largest impact in the collection.
  static LinearQuantizer fit(const ImpactCollection &collection, int bits);

  /// Throws DomainError for s <= 0 or NaN.
  std::uint32_t quantize(double score) const;

  /// Real value represented by a quantized level.
  double dequantize(std::uint32_t level) const;

  int bits() const { return bits_; }
  double s_max() const { return s_max_; }
  std::uint32_t max_level() const { return max_level_; }

  bool operator==(const LinearQuantizer &) const = default;

 private:
  int bits_;
  double s_max_;
  std::uint32_t max_level_;
};

}  // namespace impactir
