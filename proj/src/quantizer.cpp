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

#include "impactir/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impactir/errors.hpp"

namespace impactir {

namespace {

void check_bits(int bits) {
  if (bits < LinearQuantizer::kMinBits || bits > LinearQuantizer::kMaxBits) {
    throw ConfigError("quantization bits must lie in [2, 16], got " + std::to_string(bits));
  }
}

}  // namespace

LinearQuantizer::LinearQuantizer(int bits, double s_max) : bits_(bits), s_max_(s_max) {
  check_bits(bits);
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw ConfigError("quantizer scale must be finite and > 0");
  max_level_ = (1u << bits) - 1;
}

LinearQuantizer LinearQuantizer::fit(const ImpactCollection &collection, int bits) {
  check_bits(bits);
  double s_max = 0.0;
  for (const auto &doc : collection.documents()) {
    for (const auto &kv : doc.impacts) s_max = std::max(s_max, kv.second);
  }
  if (s_max <= 0.0) throw ConfigError("cannot fit a quantizer on a collection without impacts");
  return LinearQuantizer(bits, s_max);
}

std::uint32_t LinearQuantizer::quantize(double score) const {
  if (!(score > 0.0)) throw DomainError("cannot quantize non-positive score " + std::to_string(score));
  // std::round rounds half away from zero.
  const double level = std::round(score / s_max_ * static_cast<double>(max_level_));
  if (level >= static_cast<double>(max_level_)) return max_level_;
  if (level <= 1.0) return 1;
  return static_cast<std::uint32_t>(level);
}

double LinearQuantizer::dequantize(std::uint32_t level) const {
  return static_cast<double>(level) * s_max_ / static_cast<double>(max_level_);
}

}  // namespace impactir
