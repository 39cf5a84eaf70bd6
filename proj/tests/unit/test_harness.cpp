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

#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "reckon/errors.hpp"
#include "reckon/harness.hpp"
#include "util.hpp"

namespace reckon {
namespace {

// A cue run small enough for unit tests.
RunConfig small_run() {
  RunConfig run;
  run.network.n_rec = 16;
  run.data.cue.n_cues = 3;
  run.data.cue.delay_ticks = 100;
  run.data.cue.recall_ticks = 50;
  run.data.train_count = 16;
  run.data.test_count = 16;
  run.epochs = 2;
  return run;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TEST_SUITE("harness") {
  TEST_CASE("run config validation") {
    RunConfig run;
    CHECK_NOTHROW(run.validate());
    CHECK(run.epochs == 100);
    run.epochs = 0;
    CHECK_THROWS_AS(run.validate(), ConfigError);
    run = {};
    run.network.n_rec = 300;
    CHECK_THROWS_AS(run.validate(), ConfigError);
  }

  TEST_CASE("config text parsing") {
    const RunConfig run = parse_run_config(
        "# comment\n"
        "task = spid\n"
        "n_rec = 200   # trailing comment\n"
        "threshold=128\n"
        "\n"
        "reset_mode = subtract_threshold\n"
        "mode = regression\n"
        "learn = false\n"
        "cue.delay = 250\n"
        "spid.trajectories = 6\n"
        "sweep.trials = 5\n");
    CHECK(run.data.kind == DatasetKind::kSpid);
    CHECK(run.network.n_rec == 200);
    CHECK(run.network.threshold == 128);
    CHECK(run.network.reset_mode == ResetMode::kSubtractThreshold);
    CHECK(run.network.mode == TaskMode::kRegression);
    CHECK(run.learn.granularity == UpdateGranularity::kPerTick);
    CHECK_FALSE(run.learn.enabled);
    CHECK(run.data.cue.delay_ticks == 250);
    CHECK(run.data.spid.n_trajectories == 6);

    CHECK_THROWS_AS(parse_run_config("no_such_key = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("n_rec = many\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("n_rec\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("task = maze\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("n_rec = 12abc\n"), ConfigError);
  }

  TEST_CASE("sweep keys are read separately") {
    const SweepSpec spec = parse_sweep_config(
        "n_rec = 8\nsweep.trials = 7\nsweep.seed = 3\n"
        "sweep.range = threshold=10:20\nsweep.range = lr_shift=5:6\n");
    CHECK(spec.trials == 7);
    CHECK(spec.seed == 3);
    REQUIRE(spec.ranges.size() == 2);
    CHECK(spec.ranges[0].name == "threshold");
    CHECK(spec.ranges[0].lo == 10);
    CHECK(spec.ranges[1].hi == 6);
    CHECK(parse_sweep_config("n_rec = 8\n").ranges.size() == SweepSpec::defaults().ranges.size());
    CHECK_THROWS_AS(parse_sweep_config("sweep.bogus = 1\n"), ConfigError);
  }

  TEST_CASE("sweep spec validation") {
    SweepSpec spec = SweepSpec::defaults();
    CHECK_NOTHROW(spec.validate());
    spec.trials = 0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = SweepSpec::defaults();
    spec.ranges.clear();
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.ranges = {{"threshold", 10, 5}};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.ranges = {{"no_such_param", 1, 2}};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(parse_param_range("threshold"), ConfigError);
    CHECK_THROWS_AS(parse_param_range("threshold=1"), ConfigError);
    const ParamRange r = parse_param_range("leak_shift=2:5");
    CHECK(r.name == "leak_shift");
    CHECK(r.lo == 2);
    CHECK(r.hi == 5);
  }

  TEST_CASE("configure_device writes every parameter") {
    RunConfig run = small_run();
    run.network.threshold = 77;
    run.learn.lr_shift = 9;
    run.learn.feedback_seed = 0x123456789ULL;
    const Device dev = configure_device(run);
    CHECK(dev.config() == run.network);
    CHECK(dev.learn_params() == run.learn);
    CHECK(dev.core().weights() == random_weights(run.network, run.seed));
  }

  TEST_CASE("training writes the documented artifacts") {
    RunConfig run = small_run();
    const TrainResult result = train(run);
    REQUIRE(result.epochs.size() == 2);
    CHECK(result.final_test_decisions.size() == 16);

    test::TempDir dir("train");
    write_train_outputs(dir.path(), run, result);
    const std::string csv = slurp(dir.path() / "metrics.csv");
    CHECK(csv.rfind("epoch,train_acc,test_acc,skip_count,sat_count\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(load_checkpoint(dir.path() / "checkpoint.rckw") == result.checkpoint);
    const auto summary = nlohmann::json::parse(slurp(dir.path() / "summary.json"));
    CHECK(summary["epochs"] == 2);
    CHECK(summary["weights_checksum"] == result.checkpoint.weights.checksum());
  }

  TEST_CASE("identical runs produce identical files") {
    const RunConfig run = small_run();
    test::TempDir a("det-a");
    test::TempDir b("det-b");
    write_train_outputs(a.path(), run, train(run));
    write_train_outputs(b.path(), run, train(run));
    for (const char* f : {"metrics.csv", "checkpoint.rckw", "summary.json"}) {
      CHECK_MESSAGE(slurp(a.path() / f) == slurp(b.path() / f), f);
    }
  }

  TEST_CASE("dataset and topology mismatch is a shape error") {
    RunConfig run = small_run();
    const Dataset data = build_dataset(run.data);
    run.network.n_in = 16;
    CHECK_THROWS_AS(train(run, data), ShapeError);
    run = small_run();
    run.network.mode = TaskMode::kRegression;
    CHECK_THROWS_AS(train(run, data), ShapeError);
  }

  TEST_CASE("untrained networks score near chance") {
    double sum = 0.0;
    constexpr int kSeeds = 8;
    for (int seed = 1; seed <= kSeeds; ++seed) {
      RunConfig run = small_run();
      run.epochs = 1;
      run.learn.enabled = false;
      run.seed = static_cast<std::uint64_t>(seed);
      run.data.seed = static_cast<std::uint64_t>(seed);
      run.data.train_count = 64;
      sum += train(run).final_train_acc();
    }
    // Mean of 8 x 64 Bernoulli(0.5) draws: sd ~ 0.022.
    CHECK(std::fabs(sum / kSeeds - 0.5) < 0.1);
  }

  TEST_CASE("evaluation is repeatable, pure and self-consistent") {
    RunConfig run = small_run();
    const Dataset data = build_dataset(run.data);
    Device dev = configure_device(run);
    const auto checksum = dev.core().weights().checksum();
    const EvalResult a = evaluate(dev, data.test, run);
    const EvalResult b = evaluate(dev, data.test, run);
    CHECK(dev.core().weights().checksum() == checksum);
    CHECK(dev.learn_params().enabled);
    CHECK(a.decisions == b.decisions);
    CHECK(a.accuracy == b.accuracy);

    std::uint64_t total = 0;
    for (const auto& row : a.confusion) {
      for (auto c : row) total += c;
    }
    CHECK(total == data.test.size());
    int hits = 0;
    for (std::size_t i = 0; i < a.decisions.size(); ++i) hits += a.decisions[i] == a.labels[i];
    CHECK(a.accuracy == doctest::Approx(static_cast<double>(hits) / a.decisions.size()));
  }

  TEST_CASE("checkpoint evaluation needs a matching topology") {
    RunConfig run = small_run();
    const Dataset data = build_dataset(run.data);
    const Checkpoint wrong = make_checkpoint(test::topology(24, 8, 2),
                                             random_weights(test::topology(24, 8, 2), 1));
    CHECK_THROWS_AS(evaluate(wrong, data.test, run), ShapeError);
  }

  TEST_CASE("a one-trial sweep equals a direct training run") {
    RunConfig base = small_run();
    SweepSpec spec;
    spec.trials = 1;
    spec.seed = 9;
    spec.ranges = {{"threshold", 40, 90}, {"lr_shift", 16, 20}};
    const Dataset data = build_dataset(base.data);
    const auto table = sweep(spec, base, data);
    REQUIRE(table.size() == 1);
    std::vector<std::pair<std::string, std::int64_t>> params;
    const RunConfig direct = trial_config(spec, base, 0, &params);
    const TrainResult result = train(direct, data);
    CHECK(table[0].params == params);
    CHECK(table[0].seed == direct.seed);
    CHECK(table[0].train_acc == result.final_train_acc());
    CHECK(table[0].test_acc == result.final_test_acc());
    CHECK(table[0].error.empty());
  }

  TEST_CASE("sweep tables are deterministic and sorted") {
    RunConfig base = small_run();
    base.epochs = 1;
    SweepSpec spec;
    spec.trials = 5;
    spec.ranges = {{"threshold", 30, 120}, {"feedback_seed", 1, 100}};
    const Dataset data = build_dataset(base.data);
    const auto a = sweep(spec, base, data);
    const auto b = sweep(spec, base, data);
    CHECK(sweep_csv(spec, a) == sweep_csv(spec, b));
    for (std::size_t i = 1; i < a.size(); ++i) {
      CHECK(a[i - 1].test_acc >= a[i].test_acc);
      if (a[i - 1].test_acc == a[i].test_acc) CHECK(a[i - 1].trial_id < a[i].trial_id);
    }
    const std::string csv = sweep_csv(spec, a);
    CHECK(csv.rfind("trial_id,seed,threshold,feedback_seed,train_acc,test_acc,error\n", 0) == 0);
  }

  TEST_CASE("failing trials are recorded, not fatal") {
    RunConfig base = small_run();
    base.epochs = 1;
    SweepSpec spec;
    spec.trials = 2;
    // n_in 30 no longer fits the 24-channel data.
    spec.ranges = {{"n_in", 30, 30}};
    const auto table = sweep(spec, base, build_dataset(base.data));
    REQUIRE(table.size() == 2);
    for (const TrialResult& t : table) CHECK_FALSE(t.error.empty());
  }

  TEST_CASE("throughput report recomputes from its raw values") {
    RunConfig run = small_run();
    const auto stream = dense_stream(24, 2, 300, 6.0, 3);
    const BenchResult r = bench_throughput(stream, run, 3);
    REQUIRE(r.seconds.size() == 3);
    std::uint64_t events = 0;
    for (const Sample& s : stream) events += s.input_event_count();
    CHECK(r.events_per_rep == events);
    CHECK(r.ticks_per_rep == 600);
    double mean = 0.0;
    double peak = 0.0;
    for (double t : r.seconds) {
      mean += static_cast<double>(events) / t;
      peak = std::max(peak, static_cast<double>(events) / t);
    }
    CHECK(r.mean_events_per_s == doctest::Approx(mean / 3));
    CHECK(r.peak_events_per_s == doctest::Approx(peak));
    const auto j = nlohmann::json::parse(bench_json(r));
    CHECK(j["events_per_rep"] == events);
    CHECK(j["seconds"].size() == 3);
    CHECK_FALSE(j["host"].get<std::string>().empty());

    CHECK_THROWS_AS(bench_throughput({}, run, 3), InputError);
    CHECK_THROWS_AS(bench_throughput(stream, run, 0), ConfigError);
  }

  TEST_CASE("event cost stays bounded as density doubles") {
    RunConfig run = small_run();
    run.network.n_rec = 200;
    const BenchResult sparse = bench_throughput(dense_stream(24, 2, 1000, 6.0, 1), run, 3);
    const BenchResult dense = bench_throughput(dense_stream(24, 2, 1000, 12.0, 1), run, 3);
    const double ratio = dense.mean_events_per_s / sparse.mean_events_per_s;
    CHECK(ratio > 0.25);
    CHECK(ratio < 4.0);
  }

  TEST_CASE("dense streams have the requested density") {
    const auto s = dense_stream(24, 4, 500, 10.0, 2);
    REQUIRE(s.size() == 4);
    std::uint64_t events = 0;
    for (const Sample& x : s) {
      CHECK(x.duration_ticks == 500);
      events += x.input_event_count();
    }
    CHECK(static_cast<double>(events) / 2000.0 == doctest::Approx(10.0).epsilon(0.05));
  }
}

}  // namespace
}  // namespace reckon
