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

// reckon: command-line front end of the emulator.
//
//   reckon gen      --task cue|spid --out data.aer
//   reckon train    --config run.cfg --out runs/a
//   reckon eval     --config run.cfg --checkpoint runs/a/checkpoint.rckw
//   reckon sweep    --config run.cfg --trials 20 --threads 4 --out runs/sweep
//   reckon bench    --config run.cfg --out runs/bench
//   reckon validate data.aer

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "reckon/aer.hpp"
#include "reckon/errors.hpp"
#include "reckon/harness.hpp"
#include "reckon/registers.hpp"
#include "reckon/tasks.hpp"

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw reckon::InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

reckon::RunConfig load_run(const Globals& g, const std::vector<std::string>& sets) {
  reckon::RunConfig run;
  if (!g.config.empty()) run = reckon::parse_run_config(read_text(g.config));
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw reckon::ConfigError("--set expects key=value");
    reckon::apply_config_value(run, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) run.seed = *g.seed;
  if (!g.out.empty()) run.out_dir = g.out;
  run.data.cue.n_in = run.network.n_in;
  run.validate();
  return run;
}

void print_confusion(const reckon::EvalResult& r) {
  std::printf("confusion (rows = label, cols = decision)\n");
  for (const auto& row : r.confusion) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::printf("%s%llu", c ? " " : "  ", static_cast<unsigned long long>(row[c]));
    }
    std::printf("\n");
  }
}

int cmd_gen(const Globals& g, const std::vector<std::string>& sets, const std::string& task,
            std::size_t count, const std::string& format, bool split_test) {
  reckon::RunConfig run = load_run(g, sets);
  if (g.out.empty()) throw reckon::ConfigError("gen needs --out <file>");
  const std::uint64_t seed = g.seed.value_or(run.data.seed);
  reckon::EventStream stream;
  std::size_t first_index = 0;
  if (task == "cue") {
    reckon::CueTaskConfig cue = run.data.cue;
    cue.seed = seed;
    if (split_test) first_index = 1'000'000;
    stream.header.n_in = cue.n_in;
    stream.header.tick_us = cue.tick_us;
    stream.samples = reckon::gen_cue_samples(cue, count == 0 ? run.data.train_count : count,
                                             first_index);
  } else if (task == "spid") {
    reckon::SpidSurrogateConfig spid = run.data.spid;
    spid.seed = seed;
    stream.header.n_in = reckon::SpidSurrogateConfig::kChannels;
    stream.header.tick_us = spid.tick_us;
    stream.samples = reckon::gen_spid_surrogate(spid);
  } else {
    throw reckon::ConfigError("unknown task '" + task + "' (cue, spid)");
  }
  reckon::write_stream_file(g.out, stream, reckon::parse_stream_format(format));
  const std::string manifest = reckon::dataset_manifest(task, seed, stream, first_index);
  std::ofstream(g.out + ".manifest.json", std::ios::binary | std::ios::trunc) << manifest;
  std::printf("wrote %zu samples to %s\n", stream.samples.size(), g.out.c_str());
  return 0;
}

int cmd_train(const Globals& g, const std::vector<std::string>& sets) {
  const reckon::RunConfig run = load_run(g, sets);
  const reckon::Dataset data = reckon::build_dataset(run.data);
  const reckon::TrainResult res = reckon::train(run, data);
  for (const auto& m : res.epochs) {
    std::printf("epoch %3d  train %.4f  test %.4f  skip %llu  sat %llu\n", m.epoch, m.train_acc,
                m.test_acc, static_cast<unsigned long long>(m.skip_count),
                static_cast<unsigned long long>(m.sat_count));
  }
  if (!run.out_dir.empty()) reckon::write_train_outputs(run.out_dir, run, res);
  std::printf("final train %.4f test %.4f\n", res.final_train_acc(), res.final_test_acc());
  return 0;
}

int cmd_eval(const Globals& g, const std::vector<std::string>& sets,
             const std::string& checkpoint, const std::string& stream_path) {
  const reckon::RunConfig run = load_run(g, sets);
  const reckon::Checkpoint ckpt = reckon::load_checkpoint(checkpoint);
  std::vector<reckon::Sample> samples;
  if (stream_path.empty()) {
    samples = reckon::build_dataset(run.data).test;
  } else {
    samples = reckon::read_stream_file(stream_path).samples;
  }
  const reckon::EvalResult r = reckon::evaluate(ckpt, samples, run);
  std::printf("samples %zu  accuracy %.4f\n", samples.size(), r.accuracy);
  if (run.network.mode == reckon::TaskMode::kClassification) print_confusion(r);
  return 0;
}

int cmd_sweep(const Globals& g, const std::vector<std::string>& sets,
              const std::vector<std::string>& ranges, int trials) {
  const reckon::RunConfig base = load_run(g, sets);
  reckon::SweepSpec spec =
      g.config.empty() ? reckon::SweepSpec::defaults() : reckon::parse_sweep_config(read_text(g.config));
  if (!ranges.empty()) {
    spec.ranges.clear();
    for (const std::string& r : ranges) spec.ranges.push_back(reckon::parse_param_range(r));
  }
  if (trials > 0) spec.trials = trials;
  if (g.seed) spec.seed = *g.seed;

  const reckon::Dataset data = reckon::build_dataset(base.data);
  const auto table = reckon::sweep(spec, base, data, g.threads);
  const std::string csv = reckon::sweep_csv(spec, table);
  std::fputs(csv.c_str(), stdout);
  if (base.network.mode == reckon::TaskMode::kClassification && base.network.n_out == 2) {
    std::printf("event-count baseline test accuracy %.4f\n",
                reckon::event_count_baseline(data.train, data.test));
  }
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    std::ofstream(std::filesystem::path(g.out) / "sweep.csv", std::ios::binary | std::ios::trunc)
        << csv;
  }
  return 0;
}

int cmd_bench(const Globals& g, const std::vector<std::string>& sets,
              const std::string& stream_path, int reps, double events_per_tick,
              std::size_t samples, std::uint32_t ticks) {
  const reckon::RunConfig run = load_run(g, sets);
  std::vector<reckon::Sample> stream;
  if (stream_path.empty()) {
    stream = reckon::dense_stream(run.network.n_in, samples, ticks, events_per_tick, run.seed);
  } else {
    stream = reckon::read_stream_file(stream_path).samples;
  }
  const reckon::BenchResult r = reckon::bench_throughput(stream, run, reps);
  const std::string json = reckon::bench_json(r);
  std::fputs(json.c_str(), stdout);
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    std::ofstream(std::filesystem::path(g.out) / "bench.json", std::ios::binary | std::ios::trunc)
        << json;
  }
  return 0;
}

int cmd_validate(const Globals& g, const std::vector<std::string>& sets,
                 const std::string& path) {
  reckon::RunConfig run = load_run(g, sets);
  reckon::EventStream stream;
  try {
    stream = reckon::read_stream_file(path);
  } catch (const reckon::Error& e) {
    std::printf("INVALID %s\n", e.what());
    return 1;
  }
  // Without a config the header decides the channel count and mode.
  if (g.config.empty()) {
    run.network.n_in = stream.header.n_in;
    run.network.mode = stream.header.mode;
  }
  const reckon::ValidationReport report = reckon::validate_stream(stream.samples, run.network);
  std::printf("samples %zu  input events %llu  ticks %llu  mean rate %.4f ev/tick  peak %u ev/tick\n",
              report.samples.size(), static_cast<unsigned long long>(report.total_input_events),
              static_cast<unsigned long long>(report.total_ticks), report.mean_rate(),
              report.peak_events_per_tick);
  for (const reckon::Violation& v : report.violations) {
    std::printf("sample %zu event %zu %s: %s\n", v.sample, v.event,
                std::string(reckon::to_string(v.kind)).c_str(), v.message.c_str());
  }
  if (!report.ok()) {
    std::printf("INVALID %zu violations\n", report.violations.size());
    return 1;
  }
  std::printf("OK\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ReckOn RSNN accelerator emulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  app.add_option("--config", g.config, "Flat key = value configuration file")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Run seed (data seed for gen)");
  app.add_option("--out", g.out, "Output file (gen) or directory");
  app.add_option("--threads", g.threads, "Worker threads for sweep")
      ->check(CLI::Range(1, 256));
  app.add_option("--set", sets, "Override one configuration key (key=value)");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string task = "cue";
  std::size_t count = 0;
  std::string format = "text";
  bool test_split = false;
  gen->add_option("--task", task, "cue or spid");
  gen->add_option("--count", count, "Cue samples (default: train_count)");
  gen->add_option("--format", format, "text or binary");
  gen->add_flag("--test-split", test_split, "Draw the cue test-set indices");

  auto* train = app.add_subcommand("train", "Train and write metrics, summary and checkpoint");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string checkpoint;
  std::string eval_stream;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval->add_option("--data", eval_stream, "Event stream (default: configured test set)");

  auto* sweep = app.add_subcommand("sweep", "Random hyperparameter search");
  std::vector<std::string> ranges;
  int trials = 0;
  sweep->add_option("--range", ranges, "name=lo:hi (repeatable)");
  sweep->add_option("--trials", trials, "Number of trials");

  auto* bench = app.add_subcommand("bench", "Inference throughput");
  std::string bench_stream;
  int reps = 3;
  double events_per_tick = 24.0;
  std::size_t bench_samples = 8;
  std::uint32_t bench_ticks = 2000;
  bench->add_option("--data", bench_stream, "Event stream (default: dense random stream)");
  bench->add_option("--reps", reps, "Timed repetitions")->check(CLI::Range(1, 1000));
  bench->add_option("--events-per-tick", events_per_tick, "Dense stream density");
  bench->add_option("--samples", bench_samples, "Dense stream samples");
  bench->add_option("--ticks", bench_ticks, "Dense stream ticks per sample");

  auto* validate = app.add_subcommand("validate", "Check an event stream");
  std::string validate_path;
  validate->add_option("stream", validate_path, "Event stream file")->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (gen->parsed()) return cmd_gen(g, sets, task, count, format, test_split);
    if (train->parsed()) return cmd_train(g, sets);
    if (eval->parsed()) return cmd_eval(g, sets, checkpoint, eval_stream);
    if (sweep->parsed()) return cmd_sweep(g, sets, ranges, trials);
    if (bench->parsed()) {
      return cmd_bench(g, sets, bench_stream, reps, events_per_tick, bench_samples, bench_ticks);
    }
    if (validate->parsed()) return cmd_validate(g, sets, validate_path);
  } catch (const reckon::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
