// Copyright 2026 The reckon-emu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Saturating integer helpers shared by the core and the learning engine.

#ifndef RECKON_FIXED_POINT_HPP
#define RECKON_FIXED_POINT_HPP

#include <cstdint>
#include <limits>

namespace reckon::fx {

using Membrane = std::int16_t;
using Weight = std::int8_t;

inline constexpr std::int32_t kMembraneMax = std::numeric_limits<Membrane>::max();
inline constexpr std::int32_t kMembraneMin = std::numeric_limits<Membrane>::min();

// Learning updates clip symmetrically; stored weights may still hold -128
// when loaded through the register interface.
inline constexpr std::int32_t kWeightUpdateMax = 127;
inline constexpr std::int32_t kWeightUpdateMin = -127;

// Fractional bits of eligibility traces (1.0 == 256).
inline constexpr int kTraceFracBits = 8;
inline constexpr std::int32_t kTraceOne = 1 << kTraceFracBits;
inline constexpr std::int32_t kTraceMax = (1 << 30) - 1;

// Fractional bits of the error signal (1.0 == 256).
inline constexpr int kErrorFracBits = 8;
inline constexpr std::int32_t kErrorOne = 1 << kErrorFracBits;

// Feedback weights are signed Q1.7.
inline constexpr int kFeedbackFracBits = 7;

// Clamp `v` into [lo, hi]; bumps `saturations` when clipping happened.
template <typename Counter>
constexpr std::int64_t clamp_count(std::int64_t v, std::int64_t lo,
                                   std::int64_t hi, Counter& saturations) {
  if (v > hi) {
    ++saturations;
    return hi;
  }
  if (v < lo) {
    ++saturations;
    return lo;
  }
  return v;
}

template <typename Counter>
constexpr Membrane saturate_membrane(std::int64_t v, Counter& saturations) {
  return static_cast<Membrane>(
      clamp_count(v, kMembraneMin, kMembraneMax, saturations));
}

// Shift-based exponential decay: v - round(v / 2^shift). The decrement is
// rounded to nearest (half up), so values in [-2^(shift-1), 2^(shift-1))
// are fixed points. Truncation would instead hold every value in
// [0, 2^shift) and let only negative values reach zero.
constexpr std::int32_t shift_decay(std::int32_t v, int shift) {
  return v - ((v + (std::int32_t{1} << (shift - 1))) >> shift);
}

// Arithmetic right shift that rounds toward zero instead of toward -inf, so
// small negative products do not collapse to -1.
constexpr std::int64_t shift_toward_zero(std::int64_t v, int shift) {
  return v >= 0 ? (v >> shift) : -((-v) >> shift);
}

}  // namespace reckon::fx

#endif  // RECKON_FIXED_POINT_HPP
