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

#include "reckon/config.hpp"

#include <string>

#include "reckon/errors.hpp"
#include "reckon/fixed_point.hpp"

namespace reckon {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

void require_range(const char* name, long long value, long long lo, long long hi) {
  if (value < lo || value > hi) {
    throw ConfigError(std::string(name) + " must be in " + std::to_string(lo) + ".." +
                      std::to_string(hi) + ", got " + std::to_string(value));
  }
}

}  // namespace

std::string_view to_string(ResetMode m) {
  return m == ResetMode::kToZero ? "to_zero" : "subtract_threshold";
}

std::string_view to_string(TaskMode m) {
  return m == TaskMode::kClassification ? "classification" : "regression";
}

std::string_view to_string(UpdateGranularity g) {
  return g == UpdateGranularity::kPerTick ? "per_tick" : "per_sample";
}

ResetMode parse_reset_mode(std::string_view s) {
  if (s == "to_zero") return ResetMode::kToZero;
  if (s == "subtract_threshold") return ResetMode::kSubtractThreshold;
  throw ConfigError("unknown reset mode '" + std::string(s) + "'");
}

TaskMode parse_task_mode(std::string_view s) {
  if (s == "classification") return TaskMode::kClassification;
  if (s == "regression") return TaskMode::kRegression;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

UpdateGranularity parse_granularity(std::string_view s) {
  if (s == "per_tick") return UpdateGranularity::kPerTick;
  if (s == "per_sample") return UpdateGranularity::kPerSample;
  throw ConfigError("unknown update granularity '" + std::string(s) + "'");
}

void NetworkConfig::validate() const {
  require_range("n_in", n_in, 1, kMaxInputs);
  require_range("n_rec", n_rec, 1, kMaxRecurrent);
  require_range("n_out", n_out, 1, kMaxOutputs);
  require_range("threshold", threshold, 1, fx::kMembraneMax);
  require_range("leak_shift", leak_shift, 1, 15);
  require_range("readout_leak_shift", readout_leak_shift, 1, 15);
  require_range("frac_bits", frac_bits, 0, 15);
  require_range("init_weight_range", init_weight_range, 0, 127);
  require(reset_mode == ResetMode::kToZero ||
              reset_mode == ResetMode::kSubtractThreshold,
          "invalid reset mode");
  require(mode == TaskMode::kClassification || mode == TaskMode::kRegression,
          "invalid task mode");
}

void LearnParams::validate() const {
  require_range("lr_shift", lr_shift, 0, 62);
  require_range("trace_shift", trace_shift, 1, 20);
  require(surrogate_width >= 0, "surrogate_width must be positive (0 = default)");
  require_range("feedback_range", feedback_range, 1, 127);
  require(granularity == UpdateGranularity::kPerTick ||
              granularity == UpdateGranularity::kPerSample,
          "invalid update granularity");
}

}  // namespace reckon
