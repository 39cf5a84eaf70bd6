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

// Dataset generators and loaders.
//
//  * Delayed cue accumulation ("T-maze"): cues arrive on a left or a right
//    input group, a silent delay follows, then a recall group fires and the
//    network must report the majority side.
//  * Robot-arm load surrogate: 24 polarized channels (4 joints x 6 spiking
//    sources) recorded while an arm follows lemniscate trajectories, with
//    and without a payload on the gripper.

#ifndef RECKON_TASKS_HPP
#define RECKON_TASKS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reckon/aer.hpp"

namespace reckon {

struct CueTaskConfig {
  int n_in = 24;
  int n_cues = 7;
  std::uint32_t cue_period_ticks = 100;
  // Active part of each cue window; the rest of the period is silent.
  std::uint32_t cue_on_ticks = 50;
  std::uint32_t delay_ticks = 500;
  std::uint32_t recall_ticks = 150;
  int cue_group_size = 4;
  // Spike probability per tick per neuron of an active group.
  double cue_rate = 0.2;
  // Background spike probability per tick on every channel.
  double noise_rate = 0.01;
  std::uint64_t seed = 1;
  std::uint32_t tick_us = 1000;

  // Throws ConfigError.
  void validate() const;

  int left_begin() const { return 0; }
  int right_begin() const { return cue_group_size; }
  int recall_begin() const { return 2 * cue_group_size; }
  std::uint32_t cue_phase_ticks() const {
    return static_cast<std::uint32_t>(n_cues) * cue_period_ticks;
  }
  std::uint32_t duration_ticks() const {
    return cue_phase_ticks() + delay_ticks + recall_ticks;
  }
};

// Label 0 = left majority, 1 = right majority. Sample i draws from
// derive_seed(cfg.seed, i).
std::vector<Sample> gen_cue_samples(const CueTaskConfig& cfg, std::size_t count,
                                    std::size_t first_index = 0);

struct SpidSurrogateConfig {
  static constexpr int kChannels = 24;
  static constexpr int kJoints = 4;
  static constexpr int kSourcesPerJoint = 6;

  int n_trajectories = 18;
  std::uint32_t duration_ms = 2250;
  std::uint32_t tick_us = 1000;
  // Peak spike probability per tick of a fully driven channel.
  double peak_rate = 0.12;
  // Background spike probability per tick.
  double noise_rate = 0.004;
  // Gravity load on shoulder and elbow, as a fraction of the peak error.
  double load_bias = 0.35;
  // Extra tracking lag of the loaded arm, in ticks.
  std::uint32_t load_lag_ticks = 40;
  // Per-trajectory amplitude spread (uniform in [1 - j, 1 + j]).
  double amplitude_jitter = 0.45;
  // Per-sample multiplicative rate noise (uniform in [1 - j, 1 + j]).
  double rate_jitter = 0.15;
  std::uint64_t seed = 1;

  void validate() const;
  std::uint32_t sample_ticks() const {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(duration_ms) * 1000) /
                                      tick_us);
  }
};

enum class SpidClass : int { kNoLoad = 0, kLoaded = 1 };

// 2 * n_trajectories samples ordered (trajectory 0 no-load, trajectory 0
// loaded, trajectory 1 no-load, ...).
std::vector<Sample> gen_spid_surrogate(const SpidSurrogateConfig& cfg);

// Stratified split: per class, round(fraction * n_class) samples go to the
// training side, clamped so both sides keep at least one. Both outputs keep
// the input order. Throws SplitError when fraction is outside (0, 1) or a
// class has fewer than two samples.
std::pair<std::vector<Sample>, std::vector<Sample>> split_dataset(
    std::span<const Sample> samples, double fraction, std::uint64_t seed);

// Reads a recorded robot-arm dataset in either stream encoding. Throws
// ShapeError when the stream does not carry exactly 24 channels and
// ValidationError when a sample breaks a protocol invariant.
EventStream load_recorded(const std::filesystem::path& path);

// JSON manifest listing every sample with its label, per-sample seed and
// event statistics.
std::string dataset_manifest(std::string_view task, std::uint64_t seed,
                             const EventStream& stream, std::size_t first_index = 0);

// Accuracy of the best single threshold on total input-event count, fitted
// on `fit` and scored on `score` (both polarities tried).
double event_count_baseline(std::span<const Sample> fit, std::span<const Sample> score);

}  // namespace reckon

#endif  // RECKON_TASKS_HPP
