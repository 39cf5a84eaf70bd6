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

#include "reckon/eprop.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <string>

#include "reckon/errors.hpp"
#include "reckon/fixed_point.hpp"

namespace reckon {
namespace {

std::int32_t decay_trace(std::int32_t x, int shift) {
  return fx::shift_decay(x, shift);
}

std::int32_t add_spike(std::int32_t x) {
  return std::min(x + fx::kTraceOne, fx::kTraceMax);
}

// w + delta clipped to the symmetric 8-bit update range.
fx::Weight apply_delta(fx::Weight w, std::int64_t delta, std::uint64_t& saturations) {
  return static_cast<fx::Weight>(fx::clamp_count(
      static_cast<std::int64_t>(w) + delta, fx::kWeightUpdateMin,
      fx::kWeightUpdateMax, saturations));
}

}  // namespace

Eprop::Eprop(const NetworkConfig& cfg, const LearnParams& params)
    : cfg_(cfg), params_(params) {
  cfg_.validate();
  params_.validate();
  traces_.x_in.assign(static_cast<std::size_t>(cfg_.n_in), 0);
  traces_.x_rec.assign(static_cast<std::size_t>(cfg_.n_rec), 0);
  traces_.psi.assign(static_cast<std::size_t>(cfg_.n_rec), 0);
  traces_.err.assign(static_cast<std::size_t>(cfg_.n_out), 0);
  draw_feedback();
}

void Eprop::draw_feedback() {
  feedback_ = WeightMatrix(cfg_.n_out, cfg_.n_rec);
  std::mt19937_64 rng(params_.feedback_seed);
  std::uniform_int_distribution<int> dist(-params_.feedback_range,
                                          params_.feedback_range);
  for (fx::Weight& b : feedback_.data()) b = static_cast<fx::Weight>(dist(rng));
}

void Eprop::set_params(const LearnParams& params) {
  params.validate();
  const bool redraw = params.feedback_seed != params_.feedback_seed ||
                      params.feedback_range != params_.feedback_range;
  params_ = params;
  if (redraw) draw_feedback();
}

void Eprop::set_network(const NetworkConfig& cfg) {
  cfg.validate();
  if (cfg.n_in != cfg_.n_in || cfg.n_rec != cfg_.n_rec || cfg.n_out != cfg_.n_out) {
    throw ShapeError("set_network cannot change the topology of the learning engine");
  }
  cfg_ = cfg;
}

void Eprop::reset_sample() {
  std::fill(traces_.x_in.begin(), traces_.x_in.end(), 0);
  std::fill(traces_.x_rec.begin(), traces_.x_rec.end(), 0);
  std::fill(traces_.psi.begin(), traces_.psi.end(), 0);
  std::fill(traces_.err.begin(), traces_.err.end(), 0);
}

void Eprop::advance_traces(std::span<const int> core_spikes,
                           std::span<const int> input_spikes,
                           const CoreState& state) {
  const int shift = params_.trace_shift;
  for (std::int32_t& x : traces_.x_in) x = decay_trace(x, shift);
  for (std::int32_t& x : traces_.x_rec) x = decay_trace(x, shift);
  for (int i : input_spikes) traces_.x_in[i] = add_spike(traces_.x_in[i]);
  for (int j : core_spikes) traces_.x_rec[j] = add_spike(traces_.x_rec[j]);

  const std::int32_t width = params_.effective_surrogate_width(cfg_.threshold);
  for (std::size_t j = 0; j < traces_.psi.size(); ++j) {
    const std::int32_t distance = std::abs(state.v_pre[j] - cfg_.threshold);
    traces_.psi[j] = distance < width ? 1 : 0;
  }
}

std::span<const std::int32_t> Eprop::compute_error(std::span<const fx::Membrane> y,
                                                   const TargetSignal& target) {
  const int n_out = cfg_.n_out;
  if (static_cast<int>(y.size()) != n_out) {
    throw ShapeError("readout has " + std::to_string(y.size()) + " values, expected " +
                     std::to_string(n_out));
  }
  if (target.kind == TargetKind::kClassLabel) {
    if (target.label < 0 || target.label >= n_out) {
      throw ProtocolError("class label " + std::to_string(target.label) +
                          " outside 0.." + std::to_string(n_out - 1));
    }
    std::int64_t total = 0;
    for (fx::Membrane v : y) total += std::abs(static_cast<std::int32_t>(v));
    for (int k = 0; k < n_out; ++k) {
      const std::int64_t onehot = k == target.label ? fx::kErrorOne : 0;
      const std::int64_t normalized =
          total == 0 ? fx::kErrorOne / n_out
                     : (static_cast<std::int64_t>(y[k]) * fx::kErrorOne) / total;
      traces_.err[k] = static_cast<std::int32_t>(onehot - normalized);
    }
  } else {
    if (static_cast<int>(target.values.size()) != n_out) {
      throw ShapeError("regression target has " + std::to_string(target.values.size()) +
                       " values, expected " + std::to_string(n_out));
    }
    for (int k = 0; k < n_out; ++k) {
      traces_.err[k] = target.values[k] - static_cast<std::int32_t>(y[k]);
    }
  }
  return traces_.err;
}

void Eprop::apply_update(WeightMemories& weights) {
  if (!params_.enabled) return;
  ++counters_.updates;
  const int n_in = cfg_.n_in;
  const int n_rec = cfg_.n_rec;
  const int n_out = cfg_.n_out;
  const int lr = params_.lr_shift;
  const auto& err = traces_.err;

  // Input and recurrent memories, one postsynaptic column at a time.
  for (int j = 0; j < n_rec; ++j) {
    const auto column_size = static_cast<std::uint64_t>(n_in + n_rec);
    counters_.visited += column_size;
    if (traces_.psi[j] == 0) {
      counters_.skipped += column_size;
      continue;
    }
    std::int64_t broadcast = 0;
    for (int k = 0; k < n_out; ++k) {
      broadcast += static_cast<std::int64_t>(feedback_.at(k, j)) * err[k];
    }
    const std::int64_t learning_signal =
        fx::shift_toward_zero(broadcast, fx::kFeedbackFracBits);
    if (learning_signal == 0) {
      counters_.skipped += column_size;
      continue;
    }
    for (int i = 0; i < n_in; ++i) {
      const std::int32_t x = traces_.x_in[i];
      if (x == 0) {
        ++counters_.skipped;
        continue;
      }
      const std::int64_t delta = fx::shift_toward_zero(learning_signal * x, lr);
      if (delta != 0) {
        fx::Weight& w = weights.w_inp.at(i, j);
        w = apply_delta(w, delta, counters_.weight_saturations);
      }
    }
    for (int i = 0; i < n_rec; ++i) {
      const std::int32_t x = traces_.x_rec[i];
      if (x == 0) {
        ++counters_.skipped;
        continue;
      }
      const std::int64_t delta = fx::shift_toward_zero(learning_signal * x, lr);
      if (delta != 0) {
        fx::Weight& w = weights.w_rec.at(i, j);
        w = apply_delta(w, delta, counters_.weight_saturations);
      }
    }
  }

  // Readout memory.
  for (int j = 0; j < n_rec; ++j) {
    counters_.visited += static_cast<std::uint64_t>(n_out);
    const std::int32_t x = traces_.x_rec[j];
    if (x == 0) {
      counters_.skipped += static_cast<std::uint64_t>(n_out);
      continue;
    }
    auto row = weights.w_out.row(j);
    for (int k = 0; k < n_out; ++k) {
      if (err[k] == 0) {
        ++counters_.skipped;
        continue;
      }
      const std::int64_t delta =
          fx::shift_toward_zero(static_cast<std::int64_t>(err[k]) * x, lr);
      if (delta != 0) row[k] = apply_delta(row[k], delta, counters_.weight_saturations);
    }
  }
}

std::size_t Eprop::trace_bytes() const {
  return traces_.x_in.capacity() * sizeof(std::int32_t) +
         traces_.x_rec.capacity() * sizeof(std::int32_t) +
         traces_.psi.capacity() * sizeof(std::uint8_t) +
         traces_.err.capacity() * sizeof(std::int32_t);
}

}  // namespace reckon
