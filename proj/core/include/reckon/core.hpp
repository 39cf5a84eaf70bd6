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

// Fixed-point leaky integrate-and-fire recurrent core.
//
// One call to step_tick() corresponds to one Time_tick of the accelerator:
//
//   v[j] <- sat16( decay(v[j], leak_shift)
//                  + pending_input[j]
//                  + sum_{i spiked on the previous tick} w_rec[i][j] )
//   spike[j] = v[j] >= threshold, followed by the configured reset
//   y[k] <- sat16( decay(y[k], readout_leak_shift)
//                  + sum_{j spiked this tick} w_out[j][k] )
//
// where decay(v, s) = v - round(v / 2^s) (see fx::shift_decay).
// Recurrent spikes therefore reach their targets with a one-tick delay, and
// input spikes injected between two ticks are applied by the next tick.

#ifndef RECKON_CORE_HPP
#define RECKON_CORE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "reckon/config.hpp"
#include "reckon/fixed_point.hpp"
#include "reckon/weights.hpp"

namespace reckon {

struct CoreState {
  std::vector<fx::Membrane> v;
  // Membrane value before the reset of the last tick; the learning engine
  // evaluates its pseudo-derivative on this value.
  std::vector<fx::Membrane> v_pre;
  std::vector<std::uint8_t> spiked;
  std::vector<fx::Membrane> y;
  std::uint32_t tick = 0;

  friend bool operator==(const CoreState&, const CoreState&) = default;
};

struct CoreCounters {
  std::uint64_t membrane_saturations = 0;
  std::uint64_t readout_saturations = 0;
  std::uint64_t input_spikes = 0;
  std::uint64_t recurrent_spikes = 0;
  std::uint64_t ticks = 0;

  std::uint64_t saturations() const {
    return membrane_saturations + readout_saturations;
  }
};

struct TickOutput {
  std::span<const int> spikes;
  std::span<const fx::Membrane> y;
};

class Core {
 public:
  // Throws ConfigError for an invalid config and ShapeError when the weight
  // matrices do not match its topology.
  Core(const NetworkConfig& cfg, WeightMemories weights);

  const NetworkConfig& config() const { return cfg_; }

  // Replaces non-topology parameters (threshold, leaks, reset mode...).
  // Changing n_in / n_rec / n_out throws ShapeError.
  void set_config(const NetworkConfig& cfg);

  const WeightMemories& weights() const { return weights_; }
  WeightMemories& weights() { return weights_; }
  void set_weights(WeightMemories weights);

  const CoreState& state() const { return state_; }
  const CoreCounters& counters() const { return counters_; }
  void clear_counters() { counters_ = {}; }

  // Accumulates row `ae` of the input memory into the pending currents.
  // Throws ProtocolError when ae is not an input-neuron index.
  void inject_input_spike(int ae);

  // Advances the core by one tick. The returned spans stay valid until the
  // next call to step_tick() or reset_sample().
  TickOutput step_tick();

  // SAMPLE assertion: zeroes membrane, readout, spikes and the tick counter.
  // Weights are untouched.
  void reset_sample();

  // Indices of the recurrent neurons that spiked on the last tick.
  std::span<const int> last_spikes() const { return spikes_; }

 private:
  // Refractory gating point. The accelerator has no refractory period, so
  // every neuron is always allowed to integrate.
  static constexpr bool refractory_permits(int /*neuron*/) { return true; }

  NetworkConfig cfg_;
  WeightMemories weights_;
  CoreState state_;
  std::vector<std::int32_t> pending_;
  std::vector<int> spikes_;
  std::vector<int> prev_spikes_;
  CoreCounters counters_;
};

// Uniform weights in [-init_weight_range, +init_weight_range], fully
// determined by `seed`.
WeightMemories random_weights(const NetworkConfig& cfg, std::uint64_t seed);

// Validated config + random weights + zeroed state.
Core new_core(const NetworkConfig& cfg, std::uint64_t seed);

// Index of the largest readout value, lowest index on ties.
int argmax_readout(std::span<const fx::Membrane> y);

}  // namespace reckon

#endif  // RECKON_CORE_HPP
