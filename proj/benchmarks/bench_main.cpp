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

#include <benchmark/benchmark.h>

#include "reckon/aer.hpp"
#include "reckon/core.hpp"
#include "reckon/eprop.hpp"
#include "reckon/harness.hpp"

namespace reckon {
namespace {

NetworkConfig bench_config(int n_rec) {
  NetworkConfig cfg;
  cfg.n_in = 24;
  cfg.n_rec = n_rec;
  cfg.n_out = 2;
  return cfg;
}

// One tick with ~6 input spikes, inference only.
void BM_StepTick(benchmark::State& state) {
  Core core = new_core(bench_config(static_cast<int>(state.range(0))), 1);
  int ae = 0;
  for (auto _ : state) {
    for (int k = 0; k < 6; ++k) {
      core.inject_input_spike(ae);
      ae = (ae + 5) % 24;
    }
    benchmark::DoNotOptimize(core.step_tick().y.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepTick)->Arg(16)->Arg(64)->Arg(256);

// Full sample replay, with and without learning.
void BM_ReplaySample(benchmark::State& state) {
  const NetworkConfig cfg = bench_config(static_cast<int>(state.range(0)));
  LearnParams lp;
  lp.enabled = state.range(1) != 0;
  Core core = new_core(cfg, 1);
  Eprop eprop(cfg, lp);
  const auto stream = dense_stream(24, 1, 1000, 6.0, 2);
  std::uint64_t events = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(replay_sample(stream[0], core, eprop).decision);
    events += stream[0].input_event_count();
  }
  state.counters["events/s"] =
      benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ReplaySample)->Args({64, 0})->Args({64, 1})->Args({256, 0})->Args({256, 1});

void BM_ParseStream(benchmark::State& state) {
  EventStream stream;
  stream.header.n_in = 24;
  stream.samples = dense_stream(24, 8, 1000, 6.0, 3);
  const std::string bytes = serialize_stream(
      stream, state.range(0) ? StreamFormat::kBinary : StreamFormat::kText);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_stream(bytes).samples.size());
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_ParseStream)->Arg(0)->Arg(1);

}  // namespace
}  // namespace reckon

BENCHMARK_MAIN();
