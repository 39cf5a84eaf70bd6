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

// Online weight-update engine (e-prop, local in space and time).
//
// State is strictly per neuron: one presynaptic trace per input and per
// recurrent neuron, one pseudo-derivative per recurrent neuron and one error
// per readout. The eligibility of synapse (i, j) is the product
// psi[j] * x[i], formed during the update sweep and never stored.
//
// Fixed-point scales:
//   x_in, x_rec  : 8 fractional bits (a fresh spike adds 256)
//   err          : 8 fractional bits for classification, raw readout units
//                  for regression
//   feedback B   : signed Q1.7
//
// Update rule, rounding toward zero:
//   L_j          = (sum_k B[k][j] * err[k]) >> 7
//   dw_inp[i][j] = (L_j * psi[j] * x_in[i])  >> lr_shift
//   dw_rec[i][j] = (L_j * psi[j] * x_rec[i]) >> lr_shift
//   dw_out[j][k] = (err[k] * x_rec[j])       >> lr_shift
// with every addition clipped to [-127, 127].

#ifndef RECKON_EPROP_HPP
#define RECKON_EPROP_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "reckon/config.hpp"
#include "reckon/core.hpp"
#include "reckon/weights.hpp"

namespace reckon {

enum class TargetKind : std::uint8_t { kClassLabel = 0, kRegressionValue = 1 };
enum class TargetScope : std::uint8_t { kPerSample = 0, kPerTimestep = 1 };

struct TargetSignal {
  TargetKind kind = TargetKind::kClassLabel;
  int label = 0;
  // Regression target per readout, raw membrane units.
  std::vector<std::int32_t> values;
  TargetScope scope = TargetScope::kPerSample;

  static TargetSignal class_label(int label) {
    return TargetSignal{TargetKind::kClassLabel, label, {}, TargetScope::kPerSample};
  }
  static TargetSignal regression(std::vector<std::int32_t> values) {
    return TargetSignal{TargetKind::kRegressionValue, 0, std::move(values),
                        TargetScope::kPerTimestep};
  }

  friend bool operator==(const TargetSignal&, const TargetSignal&) = default;
};

struct TraceState {
  std::vector<std::int32_t> x_in;
  std::vector<std::int32_t> x_rec;
  std::vector<std::uint8_t> psi;
  std::vector<std::int32_t> err;

  // n_in + 2 * n_rec + n_out.
  std::size_t scalar_count() const {
    return x_in.size() + x_rec.size() + psi.size() + err.size();
  }
};

struct LearnCounters {
  std::uint64_t skipped = 0;             // synapse updates skipped on a zero factor
  std::uint64_t visited = 0;             // synapse updates evaluated
  std::uint64_t weight_saturations = 0;  // additions clipped at +-127
  std::uint64_t updates = 0;             // apply_update calls that ran
};

class Eprop {
 public:
  Eprop(const NetworkConfig& cfg, const LearnParams& params);

  const LearnParams& params() const { return params_; }
  // Replaces the parameters. The feedback matrix is redrawn only when its
  // seed or range changes.
  void set_params(const LearnParams& params);
  // Follows non-topology changes of the core (threshold for the surrogate).
  void set_network(const NetworkConfig& cfg);

  void set_learning(bool enabled) { params_.enabled = enabled; }
  bool learning() const { return params_.enabled; }

  const TraceState& traces() const { return traces_; }
  const WeightMatrix& feedback() const { return feedback_; }
  const LearnCounters& counters() const { return counters_; }
  void clear_counters() { counters_ = {}; }

  // Clears traces and errors at the start of a sample.
  void reset_sample();

  // Once per tick, after Core::step_tick().
  void advance_traces(std::span<const int> core_spikes,
                      std::span<const int> input_spikes, const CoreState& state);

  // Classification: err = onehot(label) - y / sum|y| (uniform 1/n_out when
  // sum|y| == 0). Regression: err = target - y. Throws ProtocolError for a
  // label outside 0..n_out-1 and ShapeError for a wrong-sized target.
  std::span<const std::int32_t> compute_error(std::span<const fx::Membrane> y,
                                              const TargetSignal& target);

  // Applies one update with the current traces and error. No-op when
  // learning is disabled.
  void apply_update(WeightMemories& weights);

  // Bytes held by per-neuron learning state, feedback matrix excluded.
  std::size_t trace_bytes() const;

 private:
  void draw_feedback();

  NetworkConfig cfg_;
  LearnParams params_;
  TraceState traces_;
  WeightMatrix feedback_;  // n_out x n_rec
  LearnCounters counters_;
};

}  // namespace reckon

#endif  // RECKON_EPROP_HPP
