/* Copyright 2026 The SymForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Portable random helpers. The standard distributions are implementation
// defined, so datasets would differ between standard libraries; these only
// consume raw 64-bit engine output.

#pragma once

#include <cstdint>
#include <random>

#include "symforge/expr.hpp"

namespace symforge {

using Rng = std::mt19937_64;

// Uniform integer in [0, bound); bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(
                  uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform big integer in [0, bound); bound > 0.
inline BigInt uniform_below(Rng& rng, const BigInt& bound) {
  const std::size_t bits = boost::multiprecision::msb(bound) + 1;
  for (;;) {
    BigInt r = 0;
    std::size_t filled = 0;
    while (filled < bits) {
      r <<= 64;
      r |= BigInt(rng());
      filled += 64;
    }
    r >>= (filled - bits);
    if (r < bound) return r;
  }
}

// Index drawn with probability proportional to weights (not all zero).
template <typename Range>
inline std::size_t weighted_index(Rng& rng, const Range& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double r = uniform01(rng) * total;
  std::size_t last = 0;
  std::size_t i = 0;
  for (double w : weights) {
    if (w > 0.0) {
      if (r < w) return i;
      r -= w;
      last = i;
    }
    ++i;
  }
  return last;
}

}  // namespace symforge
