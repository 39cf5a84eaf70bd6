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

#include "reckon/tasks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "json.hpp"
#include "reckon/errors.hpp"
#include "reckon/random.hpp"

namespace reckon {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool in_group(int channel, int begin, int size) {
  return channel >= begin && channel < begin + size;
}

// Seeds of the spike noise are kept apart from the trajectory seeds.
constexpr std::uint64_t kSpikeStream = 1u << 20;

}  // namespace

// ---------------------------------------------------------------------------
// Delayed cue accumulation

void CueTaskConfig::validate() const {
  require(n_in >= 1 && n_in <= kMaxInputs, "cue task n_in must be in 1..256");
  require(n_cues >= 1 && n_cues % 2 == 1, "n_cues must be odd and positive");
  require(cue_group_size >= 1, "cue_group_size must be positive");
  require(3 * cue_group_size <= n_in,
          "left, right and recall groups (" + std::to_string(3 * cue_group_size) +
              " channels) exceed n_in = " + std::to_string(n_in));
  require(cue_period_ticks >= 1, "cue_period_ticks must be positive");
  require(cue_on_ticks >= 1 && cue_on_ticks <= cue_period_ticks,
          "cue_on_ticks must be in 1..cue_period_ticks");
  require(cue_rate > 0.0 && cue_rate <= 1.0, "cue_rate must be in (0, 1]");
  require(noise_rate >= 0.0 && noise_rate < 1.0, "noise_rate must be in [0, 1)");
  require(tick_us >= 1, "tick_us must be positive");
}

std::vector<Sample> gen_cue_samples(const CueTaskConfig& cfg, std::size_t count,
                                    std::size_t first_index) {
  cfg.validate();
  std::vector<Sample> samples;
  samples.reserve(count);
  const std::uint32_t cue_end = cfg.cue_phase_ticks();
  const std::uint32_t recall_start = cue_end + cfg.delay_ticks;
  const std::uint32_t duration = cfg.duration_ticks();

  for (std::size_t n = 0; n < count; ++n) {
    std::mt19937_64 rng(derive_seed(cfg.seed, first_index + n));
    std::bernoulli_distribution coin(0.5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<int> sides(static_cast<std::size_t>(cfg.n_cues));
    int right = 0;
    for (int& side : sides) {
      side = coin(rng) ? 1 : 0;
      right += side;
    }
    const int label = 2 * right > cfg.n_cues ? 1 : 0;

    std::vector<Event> events;
    for (std::uint32_t t = 0; t < duration; ++t) {
      int active_begin = -1;
      if (t < cue_end) {
        const std::uint32_t cue = t / cfg.cue_period_ticks;
        if (t % cfg.cue_period_ticks < cfg.cue_on_ticks) {
          active_begin = sides[cue] == 0 ? cfg.left_begin() : cfg.right_begin();
        }
      } else if (t >= recall_start) {
        active_begin = cfg.recall_begin();
      }
      if (t == recall_start) events.push_back(Event::target(t, label));
      for (int c = 0; c < cfg.n_in; ++c) {
        double p = cfg.noise_rate;
        if (active_begin >= 0 && in_group(c, active_begin, cfg.cue_group_size)) {
          p = 1.0 - (1.0 - cfg.noise_rate) * (1.0 - cfg.cue_rate);
        }
        if (unit(rng) < p) events.push_back(Event::input(c, t));
      }
    }
    if (recall_start >= duration) events.push_back(Event::target(duration, label));
    events.push_back(Event::end(duration));
    samples.push_back(Sample::from_events(std::move(events), TaskMode::kClassification));
  }
  return samples;
}

// ---------------------------------------------------------------------------
// Robot-arm load surrogate

void SpidSurrogateConfig::validate() const {
  require(n_trajectories >= 1, "n_trajectories must be positive");
  require(tick_us >= 1, "tick_us must be positive");
  require(sample_ticks() >= 1, "duration_ms shorter than one tick");
  require(peak_rate > 0.0 && peak_rate <= 1.0, "peak_rate must be in (0, 1]");
  require(noise_rate >= 0.0 && noise_rate < 1.0, "noise_rate must be in [0, 1)");
  require(amplitude_jitter >= 0.0 && amplitude_jitter < 1.0,
          "amplitude_jitter must be in [0, 1)");
  require(rate_jitter >= 0.0 && rate_jitter < 1.0, "rate_jitter must be in [0, 1)");
  require(load_bias >= 0.0, "load_bias must be non-negative");
}

namespace {

struct Trajectory {
  double cycles = 1.0;
  double phase = 0.0;
  std::array<double, SpidSurrogateConfig::kJoints> amplitude{};
};

// Normalized joint velocity of a lemniscate sweep at angle theta. Base and
// wrist follow the slow lobe, shoulder and elbow the double-frequency one.
double joint_velocity(int joint, double theta) {
  switch (joint) {
    case 0:
      return std::cos(theta);
    case 1:
      return std::cos(2.0 * theta);
    case 2:
      return std::cos(2.0 * theta + std::numbers::pi / 3.0);
    default:
      return std::cos(theta + std::numbers::pi / 4.0);
  }
}

// Shoulder and elbow carry the payload against gravity.
constexpr std::array<double, SpidSurrogateConfig::kJoints> kGravityShare{0.0, 1.0, 0.7, 0.0};
constexpr double kTrackingGain = 2.0;
constexpr double kBaseLagTicks = 30.0;

}  // namespace

std::vector<Sample> gen_spid_surrogate(const SpidSurrogateConfig& cfg) {
  cfg.validate();
  constexpr int kJoints = SpidSurrogateConfig::kJoints;
  const std::uint32_t ticks = cfg.sample_ticks();
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(2 * cfg.n_trajectories));
  for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
    std::mt19937_64 traj_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(traj)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Trajectory tr;
    tr.cycles = 1.0 + unit(traj_rng);
    tr.phase = two_pi * unit(traj_rng);
    for (double& a : tr.amplitude) {
      a = 1.0 + cfg.amplitude_jitter * (2.0 * unit(traj_rng) - 1.0);
    }

    for (int cls = 0; cls < 2; ++cls) {
      const bool loaded = cls == static_cast<int>(SpidClass::kLoaded);
      const std::size_t index = static_cast<std::size_t>(2 * traj + cls);
      std::mt19937_64 rng(derive_seed(cfg.seed, kSpikeStream + index));
      const double gain = 1.0 + cfg.rate_jitter * (2.0 * unit(rng) - 1.0);
      const double lag = kBaseLagTicks + (loaded ? cfg.load_lag_ticks : 0.0);
      const double omega = two_pi * tr.cycles / static_cast<double>(ticks);

      std::vector<Event> events;
      events.push_back(Event::target(0, cls));
      for (std::uint32_t t = 0; t < ticks; ++t) {
        const double theta = omega * t + tr.phase;
        const double theta_lag = omega * (static_cast<double>(t) - lag) + tr.phase;
        const double pose = 0.5 + 0.5 * std::cos(theta);
        for (int j = 0; j < kJoints; ++j) {
          const double a = tr.amplitude[static_cast<std::size_t>(j)];
          const double ref = a * joint_velocity(j, theta);
          const double delayed = a * joint_velocity(j, theta_lag);
          double err = kTrackingGain * (ref - delayed);
          if (loaded) err += cfg.load_bias * kGravityShare[static_cast<std::size_t>(j)] * pose;
          const double out = delayed + err;
          const std::array<double, SpidSurrogateConfig::kSourcesPerJoint> drive{
              ref, -ref, err, -err, out, -out};
          for (int s = 0; s < SpidSurrogateConfig::kSourcesPerJoint; ++s) {
            const double level = std::clamp(drive[static_cast<std::size_t>(s)], 0.0, 1.5);
            const double p = std::min(1.0, cfg.noise_rate + gain * cfg.peak_rate * level);
            if (unit(rng) < p) {
              events.push_back(
                  Event::input(j * SpidSurrogateConfig::kSourcesPerJoint + s, t));
            }
          }
        }
      }
      events.push_back(Event::end(ticks));
      samples.push_back(Sample::from_events(std::move(events), TaskMode::kClassification));
    }
  }
  return samples;
}

// ---------------------------------------------------------------------------

std::pair<std::vector<Sample>, std::vector<Sample>> split_dataset(
    std::span<const Sample> samples, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw SplitError("split fraction must be in (0, 1), got " + std::to_string(fraction));
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < samples.size(); ++i) by_class[samples[i].label()].push_back(i);

  std::vector<std::uint8_t> to_train(samples.size(), 0);
  for (auto& [label, indices] : by_class) {
    if (indices.size() < 2) {
      throw SplitError("class " + std::to_string(label) + " has " +
                       std::to_string(indices.size()) + " sample(s); need at least 2");
    }
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(label)));
    std::shuffle(indices.begin(), indices.end(), rng);
    const auto n = static_cast<long>(indices.size());
    const long n_train = std::clamp(std::lround(fraction * static_cast<double>(n)), 1L, n - 1);
    for (long k = 0; k < n_train; ++k) to_train[indices[static_cast<std::size_t>(k)]] = 1;
  }

  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (to_train[i] ? out.first : out.second).push_back(samples[i]);
  }
  return out;
}

EventStream load_recorded(const std::filesystem::path& path) {
  EventStream stream = read_stream_file(path);
  if (stream.header.n_in != SpidSurrogateConfig::kChannels) {
    throw ShapeError("recorded dataset has " + std::to_string(stream.header.n_in) +
                     " channels, expected " +
                     std::to_string(SpidSurrogateConfig::kChannels));
  }
  NetworkConfig cfg;
  cfg.n_in = stream.header.n_in;
  cfg.mode = stream.header.mode;
  cfg.n_out = 2;
  const ValidationReport report = validate_stream(stream.samples, cfg);
  if (!report.ok()) throw ValidationError(report.violations.front().message);
  return stream;
}

std::string dataset_manifest(std::string_view task, std::uint64_t seed,
                             const EventStream& stream, std::size_t first_index) {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["seed"] = seed;
  j["n_in"] = stream.header.n_in;
  j["tick_us"] = stream.header.tick_us;
  j["mode"] = to_string(stream.header.mode);
  j["samples"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    const Sample& s = stream.samples[i];
    nlohmann::ordered_json row;
    row["index"] = first_index + i;
    row["label"] = s.label();
    row["sample_seed"] = derive_seed(seed, first_index + i);
    row["input_events"] = s.input_event_count();
    row["duration_ticks"] = s.duration_ticks;
    j["samples"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

double event_count_baseline(std::span<const Sample> fit, std::span<const Sample> score) {
  if (fit.empty() || score.empty()) throw InputError("baseline needs non-empty sets");
  std::vector<double> counts;
  for (const Sample& s : fit) counts.push_back(static_cast<double>(s.input_event_count()));
  std::vector<double> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds{sorted.front() - 0.5};
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    thresholds.push_back(0.5 * (sorted[i - 1] + sorted[i]));
  }
  thresholds.push_back(sorted.back() + 0.5);

  auto accuracy = [](std::span<const Sample> set, double thr, int high_label) {
    std::size_t hits = 0;
    for (const Sample& s : set) {
      const int predicted =
          static_cast<double>(s.input_event_count()) > thr ? high_label : 1 - high_label;
      if (predicted == s.label()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(set.size());
  };

  double best = -1.0;
  double best_thr = thresholds.front();
  int best_high = 1;
  for (double thr : thresholds) {
    for (int high : {1, 0}) {
      const double acc = accuracy(fit, thr, high);
      if (acc > best) {
        best = acc;
        best_thr = thr;
        best_high = high;
      }
    }
  }
  return accuracy(score, best_thr, best_high);
}

}  // namespace reckon
