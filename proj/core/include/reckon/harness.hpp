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

// Training, evaluation, hyperparameter sweep and throughput workflows.
//
// A run follows the accelerator test flow: a configuration phase writes
// every parameter register and loads randomly initialized weight memories,
// then each epoch replays the shuffled training set with learning enabled
// and scores the training and test sets with learning disabled.

#ifndef RECKON_HARNESS_HPP
#define RECKON_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reckon/aer.hpp"
#include "reckon/config.hpp"
#include "reckon/registers.hpp"
#include "reckon/tasks.hpp"

namespace reckon {

enum class DatasetKind : std::uint8_t { kCue, kSpid, kFiles };

std::string_view to_string(DatasetKind k);

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kCue;
  std::uint64_t seed = 7;
  // Cue task: independent train and test draws.
  CueTaskConfig cue;
  std::size_t train_count = 128;
  std::size_t test_count = 128;
  // Robot-arm surrogate: generated set split by `split_fraction`.
  SpidSurrogateConfig spid;
  double split_fraction = 0.5;
  // Files: a test path is optional; without it the train file is split.
  std::filesystem::path train_path;
  std::filesystem::path test_path;
};

struct Dataset {
  StreamHeader header;
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// Generates or loads the data described by `spec`.
Dataset build_dataset(const DatasetSpec& spec);

struct RunConfig {
  NetworkConfig network;
  LearnParams learn;
  DatasetSpec data;
  int epochs = 100;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
  std::uint32_t tick_budget = 1u << 20;
  // Regression: a tick counts as a hit when every readout lies within this
  // many raw units of its target.
  std::int32_t regression_tolerance = 32;

  // Throws ConfigError.
  void validate() const;
};

// Flat "key = value" configuration text; '#' starts a comment. Unknown keys
// throw ConfigError. See docs/config.md for the schema.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
// Applies one key; the sweep uses this to override parameters.
void apply_config_value(RunConfig& run, std::string_view key, std::string_view value);
// Canonical text form; parse_run_config(format_run_config(r)) == r.
std::string format_run_config(const RunConfig& run);

struct EpochMetrics {
  int epoch = 0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::uint64_t skip_count = 0;
  std::uint64_t sat_count = 0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  Checkpoint checkpoint;
  // Test-set decisions of the final evaluation.
  std::vector<int> final_test_decisions;

  double final_train_acc() const { return epochs.empty() ? 0.0 : epochs.back().train_acc; }
  double final_test_acc() const { return epochs.empty() ? 0.0 : epochs.back().test_acc; }
};

struct EvalResult {
  double accuracy = 0.0;
  // confusion[label][decision]; classification only.
  std::vector<std::vector<std::uint64_t>> confusion;
  std::vector<int> decisions;
  std::vector<int> labels;
};

// Configuration phase: writes every parameter register of a fresh device
// and loads random weight memories drawn from `run.seed`.
Device configure_device(const RunConfig& run);

// Scores `samples` with learning disabled; the device's weights are left
// bit-identical.
EvalResult evaluate(Device& device, std::span<const Sample> samples, const RunConfig& run);

// Builds a device from `run`, loads the checkpoint and evaluates. Throws
// ShapeError when the checkpoint topology differs from run.network.
EvalResult evaluate(const Checkpoint& ckpt, std::span<const Sample> samples,
                    const RunConfig& run);

// Throws ShapeError when the dataset does not fit the topology.
TrainResult train(const RunConfig& run, const Dataset& data);
TrainResult train(const RunConfig& run);

// metrics.csv, summary.json and checkpoint.rckw in `dir`.
void write_train_outputs(const std::filesystem::path& dir, const RunConfig& run,
                         const TrainResult& result);
std::string metrics_csv(const TrainResult& result);

struct ParamRange {
  std::string name;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

struct SweepSpec {
  std::vector<ParamRange> ranges;
  int trials = 20;
  std::uint64_t seed = 1;

  void validate() const;
  // Ranges over thresholds, leaks and learning parameters documented in
  // docs/config.md.
  static SweepSpec defaults();
};

// "name=lo:hi" entries.
ParamRange parse_param_range(std::string_view text);

// Reads the sweep.trials, sweep.seed and sweep.range keys of a config text
// and ignores every other key. Any sweep.range line replaces the default
// ranges of `base`.
SweepSpec parse_sweep_config(std::string_view text, SweepSpec base = SweepSpec::defaults());

struct TrialResult {
  int trial_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::int64_t>> params;
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::string error;
};

// Configuration of trial `trial_id`: parameters drawn uniformly from the
// ranges with derive_seed(spec.seed, trial_id), which also seeds the run.
RunConfig trial_config(const SweepSpec& spec, const RunConfig& base, int trial_id,
                       std::vector<std::pair<std::string, std::int64_t>>* params = nullptr);

// Runs every trial (on up to `threads` workers) and returns the table sorted
// by test accuracy, best first, ties broken by trial id. A failing trial is
// recorded with its error message.
std::vector<TrialResult> sweep(const SweepSpec& spec, const RunConfig& base,
                               const Dataset& data, int threads = 1);
std::string sweep_csv(const SweepSpec& spec, std::span<const TrialResult> table);

struct BenchResult {
  std::uint64_t events_per_rep = 0;
  std::uint64_t ticks_per_rep = 0;
  std::vector<double> seconds;
  double mean_events_per_s = 0.0;
  double peak_events_per_s = 0.0;
  double ticks_per_s = 0.0;
  std::string host;
};

// Inference throughput: a warm-up pass, then `repetitions` timed passes
// over the stream. Throws InputError for an empty stream.
BenchResult bench_throughput(std::span<const Sample> stream, const RunConfig& run,
                             int repetitions = 3);
std::string bench_json(const BenchResult& result);

// Uniform random stream with `events_per_tick` expected input events per
// tick, for throughput runs.
std::vector<Sample> dense_stream(int n_in, std::size_t samples, std::uint32_t ticks,
                                 double events_per_tick, std::uint64_t seed);

std::string host_descriptor();

}  // namespace reckon

#endif  // RECKON_HARNESS_HPP
