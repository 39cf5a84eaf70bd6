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

#include "reckon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "reckon/errors.hpp"
#include "reckon/random.hpp"

#ifdef __linux__
#include <sys/utsname.h>
#endif

namespace reckon {
namespace {

// Stream ids for derive_seed so that no two consumers share a sequence.
constexpr std::uint64_t kShuffleStream = 0x5348'0000;
constexpr std::uint64_t kTestStream = 1'000'000;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_int(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                      "' is not an integer in range");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                      "' is not a number");
  }
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': '" + std::string(value) +
                    "' is not a boolean");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_rate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

DatasetKind parse_dataset_kind(std::string_view s) {
  if (s == "cue") return DatasetKind::kCue;
  if (s == "spid") return DatasetKind::kSpid;
  if (s == "files") return DatasetKind::kFiles;
  throw ConfigError("unknown task '" + std::string(s) + "' (cue, spid, files)");
}

void check_dataset_fits(const RunConfig& run, const Dataset& data) {
  const NetworkConfig& cfg = run.network;
  if (data.header.n_in != cfg.n_in) {
    throw ShapeError("dataset has " + std::to_string(data.header.n_in) +
                     " input channels, network expects n_in = " + std::to_string(cfg.n_in));
  }
  if (data.header.mode != cfg.mode) {
    throw ShapeError("dataset mode " + std::string(to_string(data.header.mode)) +
                     " differs from network mode " + std::string(to_string(cfg.mode)));
  }
  for (const auto* set : {&data.train, &data.test}) {
    const ValidationReport report = validate_stream(*set, cfg);
    if (!report.ok()) {
      throw ShapeError("dataset does not fit the topology: " +
                       report.violations.front().message);
    }
  }
}

ReplayOptions replay_options(const RunConfig& run) {
  ReplayOptions opts;
  opts.tick_budget = run.tick_budget;
  return opts;
}

}  // namespace

std::string_view to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::kCue:
      return "cue";
    case DatasetKind::kSpid:
      return "spid";
    case DatasetKind::kFiles:
      return "files";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Datasets

Dataset build_dataset(const DatasetSpec& spec) {
  Dataset data;
  switch (spec.kind) {
    case DatasetKind::kCue: {
      CueTaskConfig cue = spec.cue;
      cue.seed = spec.seed;
      data.header.n_in = cue.n_in;
      data.header.tick_us = cue.tick_us;
      data.train = gen_cue_samples(cue, spec.train_count, 0);
      data.test = gen_cue_samples(cue, spec.test_count, kTestStream);
      break;
    }
    case DatasetKind::kSpid: {
      SpidSurrogateConfig spid = spec.spid;
      spid.seed = spec.seed;
      data.header.n_in = SpidSurrogateConfig::kChannels;
      data.header.tick_us = spid.tick_us;
      const auto all = gen_spid_surrogate(spid);
      auto [train, test] = split_dataset(all, spec.split_fraction, spec.seed);
      data.train = std::move(train);
      data.test = std::move(test);
      break;
    }
    case DatasetKind::kFiles: {
      if (spec.train_path.empty()) throw ConfigError("task 'files' needs train_path");
      EventStream train = read_stream_file(spec.train_path);
      data.header = train.header;
      if (spec.test_path.empty()) {
        auto [tr, te] = split_dataset(train.samples, spec.split_fraction, spec.seed);
        data.train = std::move(tr);
        data.test = std::move(te);
      } else {
        EventStream test = read_stream_file(spec.test_path);
        if (test.header.n_in != train.header.n_in || test.header.mode != train.header.mode) {
          throw ShapeError("train and test streams disagree on n_in or mode");
        }
        data.train = std::move(train.samples);
        data.test = std::move(test.samples);
      }
      break;
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Configuration text

void RunConfig::validate() const {
  network.validate();
  learn.validate();
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (tick_budget < 1) throw ConfigError("tick_budget must be >= 1");
  if (regression_tolerance < 0) throw ConfigError("regression_tolerance must be >= 0");
}

void apply_config_value(RunConfig& run, std::string_view key, std::string_view value) {
  NetworkConfig& n = run.network;
  LearnParams& l = run.learn;
  DatasetSpec& d = run.data;
  // Network.
  if (key == "n_in") {
    n.n_in = parse_int<int>(key, value);
    d.cue.n_in = n.n_in;
  } else if (key == "n_rec") {
    n.n_rec = parse_int<int>(key, value);
  } else if (key == "n_out") {
    n.n_out = parse_int<int>(key, value);
  } else if (key == "threshold") {
    n.threshold = parse_int<std::int32_t>(key, value);
  } else if (key == "leak_shift") {
    n.leak_shift = parse_int<int>(key, value);
  } else if (key == "readout_leak_shift") {
    n.readout_leak_shift = parse_int<int>(key, value);
  } else if (key == "reset_mode") {
    n.reset_mode = parse_reset_mode(value);
  } else if (key == "frac_bits") {
    n.frac_bits = parse_int<int>(key, value);
  } else if (key == "mode") {
    n.mode = parse_task_mode(value);
    l.granularity = LearnParams::default_granularity(n.mode);
  } else if (key == "init_weight_range") {
    n.init_weight_range = parse_int<int>(key, value);
    // Learning.
  } else if (key == "lr_shift") {
    l.lr_shift = parse_int<int>(key, value);
  } else if (key == "trace_shift") {
    l.trace_shift = parse_int<int>(key, value);
  } else if (key == "surrogate_width") {
    l.surrogate_width = parse_int<std::int32_t>(key, value);
  } else if (key == "feedback_seed") {
    l.feedback_seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "feedback_range") {
    l.feedback_range = parse_int<int>(key, value);
  } else if (key == "learn") {
    l.enabled = parse_bool(key, value);
  } else if (key == "update_granularity") {
    l.granularity = parse_granularity(value);
    // Dataset.
  } else if (key == "task") {
    d.kind = parse_dataset_kind(value);
  } else if (key == "data_seed") {
    d.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "train_count") {
    d.train_count = parse_int<std::size_t>(key, value);
  } else if (key == "test_count") {
    d.test_count = parse_int<std::size_t>(key, value);
  } else if (key == "split_fraction") {
    d.split_fraction = parse_double(key, value);
  } else if (key == "train_path") {
    d.train_path = std::string(value);
  } else if (key == "test_path") {
    d.test_path = std::string(value);
  } else if (key == "cue.n_cues") {
    d.cue.n_cues = parse_int<int>(key, value);
  } else if (key == "cue.cue_period") {
    d.cue.cue_period_ticks = parse_int<std::uint32_t>(key, value);
  } else if (key == "cue.cue_on") {
    d.cue.cue_on_ticks = parse_int<std::uint32_t>(key, value);
  } else if (key == "cue.delay") {
    d.cue.delay_ticks = parse_int<std::uint32_t>(key, value);
  } else if (key == "cue.recall") {
    d.cue.recall_ticks = parse_int<std::uint32_t>(key, value);
  } else if (key == "cue.group_size") {
    d.cue.cue_group_size = parse_int<int>(key, value);
  } else if (key == "cue.cue_rate") {
    d.cue.cue_rate = parse_double(key, value);
  } else if (key == "cue.noise_rate") {
    d.cue.noise_rate = parse_double(key, value);
  } else if (key == "cue.tick_us") {
    d.cue.tick_us = parse_int<std::uint32_t>(key, value);
  } else if (key == "spid.trajectories") {
    d.spid.n_trajectories = parse_int<int>(key, value);
  } else if (key == "spid.duration_ms") {
    d.spid.duration_ms = parse_int<std::uint32_t>(key, value);
  } else if (key == "spid.tick_us") {
    d.spid.tick_us = parse_int<std::uint32_t>(key, value);
  } else if (key == "spid.peak_rate") {
    d.spid.peak_rate = parse_double(key, value);
  } else if (key == "spid.noise_rate") {
    d.spid.noise_rate = parse_double(key, value);
  } else if (key == "spid.load_bias") {
    d.spid.load_bias = parse_double(key, value);
  } else if (key == "spid.load_lag") {
    d.spid.load_lag_ticks = parse_int<std::uint32_t>(key, value);
  } else if (key == "spid.amplitude_jitter") {
    d.spid.amplitude_jitter = parse_double(key, value);
  } else if (key == "spid.rate_jitter") {
    d.spid.rate_jitter = parse_double(key, value);
    // Run.
  } else if (key == "epochs") {
    run.epochs = parse_int<int>(key, value);
  } else if (key == "seed") {
    run.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "out") {
    run.out_dir = std::string(value);
  } else if (key == "tick_budget") {
    run.tick_budget = parse_int<std::uint32_t>(key, value);
  } else if (key == "regression_tolerance") {
    run.regression_tolerance = parse_int<std::int32_t>(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

namespace {

// Visits every non-empty "key = value" line.
template <typename Fn>
void for_each_entry(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    fn(key, value);
    if (eol == text.size()) break;
  }
}

}  // namespace

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  for_each_entry(text, [&](const std::string& key, const std::string& value) {
    if (key.rfind("sweep.", 0) == 0) return;
    apply_config_value(base, key, value);
  });
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), std::move(base));
}

std::string format_run_config(const RunConfig& run) {
  const NetworkConfig& n = run.network;
  const LearnParams& l = run.learn;
  const DatasetSpec& d = run.data;
  std::ostringstream os;
  auto kv = [&](std::string_view k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto num = [](auto v) { return std::to_string(v); };
  kv("n_in", num(n.n_in));
  kv("n_rec", num(n.n_rec));
  kv("n_out", num(n.n_out));
  kv("threshold", num(n.threshold));
  kv("leak_shift", num(n.leak_shift));
  kv("readout_leak_shift", num(n.readout_leak_shift));
  kv("reset_mode", std::string(to_string(n.reset_mode)));
  kv("frac_bits", num(n.frac_bits));
  kv("mode", std::string(to_string(n.mode)));
  kv("init_weight_range", num(n.init_weight_range));
  kv("lr_shift", num(l.lr_shift));
  kv("trace_shift", num(l.trace_shift));
  kv("surrogate_width", num(l.surrogate_width));
  kv("feedback_seed", num(l.feedback_seed));
  kv("feedback_range", num(l.feedback_range));
  kv("learn", l.enabled ? "true" : "false");
  kv("update_granularity", std::string(to_string(l.granularity)));
  kv("task", std::string(to_string(d.kind)));
  kv("data_seed", num(d.seed));
  kv("train_count", num(d.train_count));
  kv("test_count", num(d.test_count));
  kv("split_fraction", format_double(d.split_fraction));
  if (!d.train_path.empty()) kv("train_path", d.train_path.string());
  if (!d.test_path.empty()) kv("test_path", d.test_path.string());
  kv("cue.n_cues", num(d.cue.n_cues));
  kv("cue.cue_period", num(d.cue.cue_period_ticks));
  kv("cue.cue_on", num(d.cue.cue_on_ticks));
  kv("cue.delay", num(d.cue.delay_ticks));
  kv("cue.recall", num(d.cue.recall_ticks));
  kv("cue.group_size", num(d.cue.cue_group_size));
  kv("cue.cue_rate", format_double(d.cue.cue_rate));
  kv("cue.noise_rate", format_double(d.cue.noise_rate));
  kv("cue.tick_us", num(d.cue.tick_us));
  kv("spid.trajectories", num(d.spid.n_trajectories));
  kv("spid.duration_ms", num(d.spid.duration_ms));
  kv("spid.tick_us", num(d.spid.tick_us));
  kv("spid.peak_rate", format_double(d.spid.peak_rate));
  kv("spid.noise_rate", format_double(d.spid.noise_rate));
  kv("spid.load_bias", format_double(d.spid.load_bias));
  kv("spid.load_lag", num(d.spid.load_lag_ticks));
  kv("spid.amplitude_jitter", format_double(d.spid.amplitude_jitter));
  kv("spid.rate_jitter", format_double(d.spid.rate_jitter));
  kv("epochs", num(run.epochs));
  kv("seed", num(run.seed));
  if (!run.out_dir.empty()) kv("out", run.out_dir.string());
  kv("tick_budget", num(run.tick_budget));
  kv("regression_tolerance", num(run.regression_tolerance));
  return os.str();
}

// ---------------------------------------------------------------------------
// Train / evaluate

Device configure_device(const RunConfig& run) {
  run.validate();
  Device dev;
  const NetworkConfig& n = run.network;
  const LearnParams& l = run.learn;
  const std::pair<std::uint16_t, std::uint32_t> writes[] = {
      {reg::kNIn, static_cast<std::uint32_t>(n.n_in)},
      {reg::kNRec, static_cast<std::uint32_t>(n.n_rec)},
      {reg::kNOut, static_cast<std::uint32_t>(n.n_out)},
      {reg::kThreshold, static_cast<std::uint32_t>(n.threshold)},
      {reg::kLeakShift, static_cast<std::uint32_t>(n.leak_shift)},
      {reg::kReadoutLeakShift, static_cast<std::uint32_t>(n.readout_leak_shift)},
      {reg::kResetMode, static_cast<std::uint32_t>(n.reset_mode)},
      {reg::kFracBits, static_cast<std::uint32_t>(n.frac_bits)},
      {reg::kMode, static_cast<std::uint32_t>(n.mode)},
      {reg::kInitWeightRange, static_cast<std::uint32_t>(n.init_weight_range)},
      {reg::kLrShift, static_cast<std::uint32_t>(l.lr_shift)},
      {reg::kTraceShift, static_cast<std::uint32_t>(l.trace_shift)},
      {reg::kSurrogateWidth, static_cast<std::uint32_t>(l.surrogate_width)},
      {reg::kFeedbackRange, static_cast<std::uint32_t>(l.feedback_range)},
      {reg::kFeedbackSeedLo, static_cast<std::uint32_t>(l.feedback_seed)},
      {reg::kFeedbackSeedHi, static_cast<std::uint32_t>(l.feedback_seed >> 32)},
      {reg::kUpdateGranularity, static_cast<std::uint32_t>(l.granularity)},
      {reg::kLearnEnable, l.enabled ? 1u : 0u},
  };
  for (const auto& [addr, value] : writes) dev.write_reg(addr, value);

  const WeightMemories init = random_weights(n, run.seed);
  dev.load_weights(MatrixId::kInput, init.w_inp);
  dev.load_weights(MatrixId::kRecurrent, init.w_rec);
  dev.load_weights(MatrixId::kOutput, init.w_out);
  return dev;
}

EvalResult evaluate(Device& device, std::span<const Sample> samples, const RunConfig& run) {
  const std::uint32_t was_enabled = device.read_reg(reg::kLearnEnable);
  device.write_reg(reg::kLearnEnable, 0);

  const int n_out = device.config().n_out;
  const bool classification = device.config().mode == TaskMode::kClassification;
  EvalResult res;
  res.confusion.assign(static_cast<std::size_t>(n_out),
                       std::vector<std::uint64_t>(static_cast<std::size_t>(n_out), 0));
  const ReplayOptions opts = replay_options(run);
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  for (const Sample& s : samples) {
    const ReplayOutcome out = device.run_sample(s, opts, run.regression_tolerance);
    res.decisions.push_back(out.decision);
    res.labels.push_back(s.label());
    if (classification) {
      ++total;
      if (out.decision == s.label()) ++hits;
      if (s.label() >= 0 && s.label() < n_out) {
        ++res.confusion[static_cast<std::size_t>(s.label())]
                       [static_cast<std::size_t>(out.decision)];
      }
    } else {
      total += out.target_ticks;
      hits += out.target_hits;
    }
  }
  res.accuracy = total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
  device.write_reg(reg::kLearnEnable, was_enabled);
  return res;
}

EvalResult evaluate(const Checkpoint& ckpt, std::span<const Sample> samples,
                    const RunConfig& run) {
  Device dev = configure_device(run);
  restore_checkpoint(dev, ckpt);
  return evaluate(dev, samples, run);
}

TrainResult train(const RunConfig& run, const Dataset& data) {
  run.validate();
  check_dataset_fits(run, data);
  Device dev = configure_device(run);
  const ReplayOptions opts = replay_options(run);

  TrainResult result;
  std::vector<std::size_t> order(data.train.size());
  EvalResult test_eval;
  for (int epoch = 1; epoch <= run.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(run.seed, kShuffleStream + static_cast<std::uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), rng);

    dev.core().clear_counters();
    dev.eprop().clear_counters();
    dev.write_reg(reg::kLearnEnable, run.learn.enabled ? 1u : 0u);
    for (std::size_t idx : order) dev.run_sample(data.train[idx], opts, run.regression_tolerance);
    const std::uint64_t skipped = dev.eprop().counters().skipped;

    const EvalResult train_eval = evaluate(dev, data.train, run);
    test_eval = evaluate(dev, data.test, run);

    EpochMetrics m;
    m.epoch = epoch;
    m.train_acc = train_eval.accuracy;
    m.test_acc = test_eval.accuracy;
    m.skip_count = skipped;
    m.sat_count = dev.core().counters().saturations() + dev.eprop().counters().weight_saturations;
    result.epochs.push_back(m);
  }
  result.checkpoint = make_checkpoint(dev.config(), dev.core().weights());
  result.final_test_decisions = std::move(test_eval.decisions);
  return result;
}

TrainResult train(const RunConfig& run) {
  RunConfig r = run;
  r.data.cue.n_in = r.network.n_in;
  return train(r, build_dataset(r.data));
}

std::string metrics_csv(const TrainResult& result) {
  std::string out = "epoch,train_acc,test_acc,skip_count,sat_count\n";
  for (const EpochMetrics& m : result.epochs) {
    out += std::to_string(m.epoch) + "," + format_rate(m.train_acc) + "," +
           format_rate(m.test_acc) + "," + std::to_string(m.skip_count) + "," +
           std::to_string(m.sat_count) + "\n";
  }
  return out;
}

void write_train_outputs(const std::filesystem::path& dir, const RunConfig& run,
                         const TrainResult& result) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "metrics.csv", std::ios::binary | std::ios::trunc);
    out << metrics_csv(result);
  }
  save_checkpoint(dir / "checkpoint.rckw", result.checkpoint);

  nlohmann::ordered_json j;
  j["epochs"] = result.epochs.size();
  j["final_train_acc"] = result.final_train_acc();
  j["final_test_acc"] = result.final_test_acc();
  j["best_test_acc"] = 0.0;
  for (const EpochMetrics& m : result.epochs) {
    j["best_test_acc"] = std::max(j["best_test_acc"].get<double>(), m.test_acc);
  }
  j["weights_checksum"] = result.checkpoint.weights.checksum();
  j["checkpoint"] = "checkpoint.rckw";
  j["metrics"] = "metrics.csv";
  nlohmann::ordered_json cfg;
  for_each_entry(format_run_config(run), [&](const std::string& k, const std::string& v) {
    if (k != "out") cfg[k] = v;
  });
  j["config"] = std::move(cfg);
  std::ofstream out(dir / "summary.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Sweep

void SweepSpec::validate() const {
  if (trials < 1) throw ConfigError("sweep needs at least one trial");
  if (ranges.empty()) throw ConfigError("sweep needs at least one parameter range");
  for (const ParamRange& r : ranges) {
    if (r.lo > r.hi) throw ConfigError("empty range for " + r.name);
    RunConfig probe;
    apply_config_value(probe, r.name, std::to_string(r.lo));
  }
}

SweepSpec SweepSpec::defaults() {
  SweepSpec s;
  s.ranges = {
      {"threshold", 96, 384},  {"leak_shift", 2, 6},    {"readout_leak_shift", 8, 12},
      {"lr_shift", 14, 19},    {"trace_shift", 8, 12},  {"feedback_seed", 1, 1000},
  };
  return s;
}

ParamRange parse_param_range(std::string_view text) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string_view::npos ? 0 : eq);
  if (eq == std::string_view::npos || colon == std::string_view::npos) {
    throw ConfigError("parameter range must look like name=lo:hi, got '" +
                      std::string(text) + "'");
  }
  ParamRange r;
  r.name = trim(text.substr(0, eq));
  const std::string lo = trim(text.substr(eq + 1, colon - eq - 1));
  const std::string hi = trim(text.substr(colon + 1));
  r.lo = parse_int<std::int64_t>(r.name, lo);
  r.hi = parse_int<std::int64_t>(r.name, hi);
  return r;
}

SweepSpec parse_sweep_config(std::string_view text, SweepSpec base) {
  bool replaced = false;
  for_each_entry(text, [&](const std::string& key, const std::string& value) {
    if (key == "sweep.trials") {
      base.trials = parse_int<int>(key, value);
    } else if (key == "sweep.seed") {
      base.seed = parse_int<std::uint64_t>(key, value);
    } else if (key == "sweep.range") {
      if (!replaced) base.ranges.clear();
      replaced = true;
      base.ranges.push_back(parse_param_range(value));
    } else if (key.rfind("sweep.", 0) == 0) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  });
  return base;
}

RunConfig trial_config(const SweepSpec& spec, const RunConfig& base, int trial_id,
                       std::vector<std::pair<std::string, std::int64_t>>* params) {
  RunConfig run = base;
  const std::uint64_t trial_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(trial_id));
  std::mt19937_64 rng(trial_seed);
  for (const ParamRange& r : spec.ranges) {
    std::uniform_int_distribution<std::int64_t> dist(r.lo, r.hi);
    const std::int64_t v = dist(rng);
    apply_config_value(run, r.name, std::to_string(v));
    if (params) params->emplace_back(r.name, v);
  }
  run.seed = trial_seed;
  run.out_dir.clear();
  return run;
}

std::vector<TrialResult> sweep(const SweepSpec& spec, const RunConfig& base,
                               const Dataset& data, int threads) {
  spec.validate();
  std::vector<TrialResult> table(static_cast<std::size_t>(spec.trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int id = next.fetch_add(1); id < spec.trials; id = next.fetch_add(1)) {
      TrialResult& row = table[static_cast<std::size_t>(id)];
      row.trial_id = id;
      try {
        const RunConfig run = trial_config(spec, base, id, &row.params);
        row.seed = run.seed;
        const TrainResult res = train(run, data);
        row.train_acc = res.final_train_acc();
        row.test_acc = res.final_test_acc();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n_workers = std::clamp(threads, 1, spec.trials);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  std::stable_sort(table.begin(), table.end(), [](const TrialResult& a, const TrialResult& b) {
    if (a.test_acc != b.test_acc) return a.test_acc > b.test_acc;
    return a.trial_id < b.trial_id;
  });
  return table;
}

std::string sweep_csv(const SweepSpec& spec, std::span<const TrialResult> table) {
  std::string out = "trial_id,seed";
  for (const ParamRange& r : spec.ranges) out += "," + r.name;
  out += ",train_acc,test_acc,error\n";
  for (const TrialResult& t : table) {
    out += std::to_string(t.trial_id) + "," + std::to_string(t.seed);
    for (const ParamRange& r : spec.ranges) {
      out += ",";
      for (const auto& [name, v] : t.params) {
        if (name == r.name) {
          out += std::to_string(v);
          break;
        }
      }
    }
    std::string err = t.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out += "," + format_rate(t.train_acc) + "," + format_rate(t.test_acc) + "," + err + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Throughput

std::string host_descriptor() {
  std::string host;
#ifdef __linux__
  utsname u{};
  if (uname(&u) == 0) host = std::string(u.sysname) + " " + u.release + " " + u.machine;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) host += " | " + trim(line.substr(colon + 1));
      break;
    }
  }
#else
  host = "unknown";
#endif
  host += " | threads=" + std::to_string(std::thread::hardware_concurrency());
  return host;
}

BenchResult bench_throughput(std::span<const Sample> stream, const RunConfig& run,
                             int repetitions) {
  BenchResult res;
  for (const Sample& s : stream) {
    res.events_per_rep += s.input_event_count();
    res.ticks_per_rep += s.duration_ticks;
  }
  if (stream.empty() || res.events_per_rep == 0) {
    throw InputError("throughput benchmark needs a non-empty event stream");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");

  RunConfig inference = run;
  inference.learn.enabled = false;
  Device dev = configure_device(inference);
  const ReplayOptions opts = replay_options(inference);

  for (const Sample& s : stream) dev.run_sample(s, opts);  // warm-up
  for (int rep = 0; rep < repetitions; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    for (const Sample& s : stream) dev.run_sample(s, opts);
    const auto t1 = std::chrono::steady_clock::now();
    res.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  double sum_rate = 0.0;
  double total_seconds = 0.0;
  for (double sec : res.seconds) {
    const double rate = static_cast<double>(res.events_per_rep) / sec;
    sum_rate += rate;
    res.peak_events_per_s = std::max(res.peak_events_per_s, rate);
    total_seconds += sec;
  }
  res.mean_events_per_s = sum_rate / static_cast<double>(res.seconds.size());
  res.ticks_per_s = static_cast<double>(res.ticks_per_rep) *
                    static_cast<double>(res.seconds.size()) / total_seconds;
  res.host = host_descriptor();
  return res;
}

std::string bench_json(const BenchResult& r) {
  nlohmann::ordered_json j;
  j["events_per_rep"] = r.events_per_rep;
  j["ticks_per_rep"] = r.ticks_per_rep;
  j["seconds"] = r.seconds;
  nlohmann::ordered_json rates = nlohmann::ordered_json::array();
  for (double s : r.seconds) rates.push_back(static_cast<double>(r.events_per_rep) / s);
  j["events_per_s"] = std::move(rates);
  j["mean_events_per_s"] = r.mean_events_per_s;
  j["peak_events_per_s"] = r.peak_events_per_s;
  j["ticks_per_s"] = r.ticks_per_s;
  j["host"] = r.host;
  return j.dump(2) + "\n";
}

std::vector<Sample> dense_stream(int n_in, std::size_t samples, std::uint32_t ticks,
                                 double events_per_tick, std::uint64_t seed) {
  if (n_in < 1 || n_in > kMaxInputs) throw ConfigError("dense stream n_in must be in 1..256");
  const double p = std::clamp(events_per_tick / n_in, 0.0, 1.0);
  std::vector<Sample> out;
  for (std::size_t n = 0; n < samples; ++n) {
    std::mt19937_64 rng(derive_seed(seed, n));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Event> events{Event::target(0, 0)};
    for (std::uint32_t t = 0; t < ticks; ++t) {
      for (int c = 0; c < n_in; ++c) {
        if (unit(rng) < p) events.push_back(Event::input(c, t));
      }
    }
    events.push_back(Event::end(ticks));
    out.push_back(Sample::from_events(std::move(events), TaskMode::kClassification));
  }
  return out;
}

}  // namespace reckon
