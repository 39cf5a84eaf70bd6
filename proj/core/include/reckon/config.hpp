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

#ifndef RECKON_CONFIG_HPP
#define RECKON_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace reckon {

// Hardware ceilings of the accelerator.
inline constexpr int kMaxInputs = 256;
inline constexpr int kMaxRecurrent = 256;
inline constexpr int kMaxOutputs = 16;

enum class ResetMode : std::uint8_t { kToZero = 0, kSubtractThreshold = 1 };

enum class TaskMode : std::uint8_t { kClassification = 0, kRegression = 1 };

enum class UpdateGranularity : std::uint8_t { kPerTick = 0, kPerSample = 1 };

std::string_view to_string(ResetMode m);
std::string_view to_string(TaskMode m);
std::string_view to_string(UpdateGranularity g);
ResetMode parse_reset_mode(std::string_view s);
TaskMode parse_task_mode(std::string_view s);
UpdateGranularity parse_granularity(std::string_view s);

// Topology, fixed-point format and LIF parameters of one network instance.
//
// Membrane potentials are signed 16-bit with `frac_bits` fractional bits.
// Weights are aligned to the membrane LSB: a weight w adds w raw units, and
// `threshold` is expressed in the same raw units.
struct NetworkConfig {
  int n_in = 24;
  int n_rec = 64;
  int n_out = 2;
  std::int32_t threshold = 64;
  int leak_shift = 4;
  int readout_leak_shift = 12;
  ResetMode reset_mode = ResetMode::kToZero;
  int frac_bits = 8;
  TaskMode mode = TaskMode::kClassification;
  // Random weight init draws uniformly from [-init_weight_range, +range].
  int init_weight_range = 16;

  // Throws ConfigError when a field is outside its legal range.
  void validate() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Parameters of the online weight-update engine.
struct LearnParams {
  int lr_shift = 20;
  int trace_shift = 12;
  // Half-width of the boxcar pseudo-derivative around threshold. Zero selects
  // the default of threshold / 2.
  std::int32_t surrogate_width = 0;
  std::uint64_t feedback_seed = 1;
  // Feedback weights are drawn from [-feedback_range, +feedback_range] (Q1.7).
  int feedback_range = 64;
  bool enabled = true;
  UpdateGranularity granularity = UpdateGranularity::kPerSample;

  void validate() const;

  // Width actually used by the surrogate for a given threshold.
  std::int32_t effective_surrogate_width(std::int32_t threshold) const {
    return surrogate_width > 0 ? surrogate_width : threshold / 2;
  }

  // Per-sample for classification, per-tick for regression.
  static UpdateGranularity default_granularity(TaskMode mode) {
    return mode == TaskMode::kClassification ? UpdateGranularity::kPerSample
                                             : UpdateGranularity::kPerTick;
  }

  friend bool operator==(const LearnParams&, const LearnParams&) = default;
};

}  // namespace reckon

#endif  // RECKON_CONFIG_HPP
