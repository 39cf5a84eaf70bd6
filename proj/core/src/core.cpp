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

#include "reckon/core.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>
#include <utility>

#include "reckon/errors.hpp"

namespace reckon {
namespace {

void check_shape(const NetworkConfig& cfg, const WeightMemories& w) {
  auto expect = [](const WeightMatrix& m, int rows, int cols, MatrixId id) {
    if (m.rows() != rows || m.cols() != cols) {
      throw ShapeError(std::string(to_string(id)) + " weights are " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", topology expects " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
  };
  expect(w.w_inp, cfg.n_in, cfg.n_rec, MatrixId::kInput);
  expect(w.w_rec, cfg.n_rec, cfg.n_rec, MatrixId::kRecurrent);
  expect(w.w_out, cfg.n_rec, cfg.n_out, MatrixId::kOutput);
}

}  // namespace

Core::Core(const NetworkConfig& cfg, WeightMemories weights)
    : cfg_(cfg), weights_(std::move(weights)) {
  cfg_.validate();
  check_shape(cfg_, weights_);
  const auto n_rec = static_cast<std::size_t>(cfg_.n_rec);
  state_.v.assign(n_rec, 0);
  state_.v_pre.assign(n_rec, 0);
  state_.spiked.assign(n_rec, 0);
  state_.y.assign(static_cast<std::size_t>(cfg_.n_out), 0);
  pending_.assign(n_rec, 0);
  spikes_.reserve(n_rec);
  prev_spikes_.reserve(n_rec);
}

void Core::set_config(const NetworkConfig& cfg) {
  cfg.validate();
  if (cfg.n_in != cfg_.n_in || cfg.n_rec != cfg_.n_rec || cfg.n_out != cfg_.n_out) {
    throw ShapeError("set_config cannot change the topology of a core");
  }
  cfg_ = cfg;
}

void Core::set_weights(WeightMemories weights) {
  check_shape(cfg_, weights);
  weights_ = std::move(weights);
}

void Core::inject_input_spike(int ae) {
  if (ae < 0 || ae >= cfg_.n_in) {
    throw ProtocolError("input address " + std::to_string(ae) +
                        " outside 0.." + std::to_string(cfg_.n_in - 1));
  }
  const auto row = weights_.w_inp.row(ae);
  for (std::size_t j = 0; j < row.size(); ++j) pending_[j] += row[j];
  ++counters_.input_spikes;
}

TickOutput Core::step_tick() {
  // Recurrent spikes of the previous tick land now.
  std::swap(prev_spikes_, spikes_);
  for (int i : prev_spikes_) {
    const auto row = weights_.w_rec.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) pending_[j] += row[j];
  }
  spikes_.clear();

  const int n_rec = cfg_.n_rec;
  const std::int32_t threshold = cfg_.threshold;
  for (int j = 0; j < n_rec; ++j) {
    const std::int32_t leaked = fx::shift_decay(state_.v[j], cfg_.leak_shift);
    fx::Membrane v = fx::saturate_membrane(
        static_cast<std::int64_t>(leaked) + pending_[j],
        counters_.membrane_saturations);
    pending_[j] = 0;
    state_.v_pre[j] = v;
    const bool fire = refractory_permits(j) && v >= threshold;
    state_.spiked[j] = fire ? 1 : 0;
    if (fire) {
      spikes_.push_back(j);
      v = cfg_.reset_mode == ResetMode::kToZero
              ? fx::Membrane{0}
              : static_cast<fx::Membrane>(v - threshold);
    }
    state_.v[j] = v;
  }

  std::array<std::int32_t, kMaxOutputs> drive{};
  const int n_out = cfg_.n_out;
  for (int j : spikes_) {
    const auto row = weights_.w_out.row(j);
    for (int k = 0; k < n_out; ++k) drive[k] += row[k];
  }
  for (int k = 0; k < n_out; ++k) {
    const std::int32_t leaked = fx::shift_decay(state_.y[k], cfg_.readout_leak_shift);
    state_.y[k] = fx::saturate_membrane(static_cast<std::int64_t>(leaked) + drive[k],
                                        counters_.readout_saturations);
  }

  ++state_.tick;
  ++counters_.ticks;
  counters_.recurrent_spikes += spikes_.size();
  return TickOutput{spikes_, state_.y};
}

void Core::reset_sample() {
  std::fill(state_.v.begin(), state_.v.end(), 0);
  std::fill(state_.v_pre.begin(), state_.v_pre.end(), 0);
  std::fill(state_.spiked.begin(), state_.spiked.end(), 0);
  std::fill(state_.y.begin(), state_.y.end(), 0);
  std::fill(pending_.begin(), pending_.end(), 0);
  state_.tick = 0;
  spikes_.clear();
  prev_spikes_.clear();
}

WeightMemories random_weights(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  WeightMemories w = WeightMemories::zeros(cfg);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(-cfg.init_weight_range,
                                          cfg.init_weight_range);
  for (WeightMatrix* m : {&w.w_inp, &w.w_rec, &w.w_out}) {
    for (fx::Weight& x : m->data()) x = static_cast<fx::Weight>(dist(rng));
  }
  return w;
}

Core new_core(const NetworkConfig& cfg, std::uint64_t seed) {
  return Core(cfg, random_weights(cfg, seed));
}

int argmax_readout(std::span<const fx::Membrane> y) {
  if (y.empty()) return 0;
  return static_cast<int>(std::max_element(y.begin(), y.end()) - y.begin());
}

}  // namespace reckon
