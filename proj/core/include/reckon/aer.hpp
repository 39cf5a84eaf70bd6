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

// Address-event streams: the (AE, TS) tuples fed to the accelerator, framed
// into samples by control addresses, plus their text and binary encodings.
//
// Text format (one record per line, '#' starts a comment):
//
//   !version 1
//   !n_in 24
//   !tick_us 1000
//   !mode classification
//   E <ae> <ts>        input event, 0 <= ae < n_in
//   T <ts> <value>     target (ae = -2): class label or regression value
//   X <ts>             end of sample (ae = -1), ts = sample duration in ticks
//
// Binary format (little endian):
//
//   0  char[4] "AERS"
//   4  u16     version (1)
//   6  u16     n_in
//   8  u32     tick_us
//   12 u8      mode (0 classification, 1 regression)
//   13 u8[3]   reserved, zero
//   16 records: i32 ae, u32 ts, and an i32 payload iff ae == -2
//
// Timestamps are ticks relative to the start of their sample.

#ifndef RECKON_AER_HPP
#define RECKON_AER_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reckon/config.hpp"
#include "reckon/core.hpp"
#include "reckon/eprop.hpp"

namespace reckon {

inline constexpr std::int32_t kTargetAddress = -2;
inline constexpr std::int32_t kEndAddress = -1;
inline constexpr std::uint16_t kStreamVersion = 1;

struct Event {
  std::int32_t ae = 0;
  std::uint32_t ts = 0;
  std::optional<std::int32_t> payload;

  static Event input(std::int32_t ae, std::uint32_t ts) { return {ae, ts, std::nullopt}; }
  static Event target(std::uint32_t ts, std::int32_t value) {
    return {kTargetAddress, ts, value};
  }
  static Event end(std::uint32_t ts) { return {kEndAddress, ts, std::nullopt}; }

  bool is_input() const { return ae >= 0; }
  bool is_target() const { return ae == kTargetAddress; }
  bool is_end() const { return ae == kEndAddress; }

  friend bool operator==(const Event&, const Event&) = default;
};

// One SAMPLE window. `events` holds every record in FIFO order, control
// events included, with the end-of-sample event last.
struct Sample {
  std::vector<Event> events;
  TargetSignal target;
  std::uint32_t duration_ticks = 0;

  // Frames a sample from its events: the target comes from the ae = -2
  // events and the duration from the terminator. Throws OrderingError,
  // FramingError or ProtocolError when an invariant does not hold.
  static Sample from_events(std::vector<Event> events, TaskMode mode);

  std::size_t input_event_count() const;
  // Classification label; 0 for regression samples.
  int label() const { return target.label; }

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct StreamHeader {
  std::uint16_t version = kStreamVersion;
  int n_in = 0;
  std::uint32_t tick_us = 1000;
  TaskMode mode = TaskMode::kClassification;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

struct EventStream {
  StreamHeader header;
  std::vector<Sample> samples;

  friend bool operator==(const EventStream&, const EventStream&) = default;
};

enum class StreamFormat : std::uint8_t { kText, kBinary };

StreamFormat parse_stream_format(std::string_view s);

// Auto-detects the encoding from the leading magic bytes. Throws
// OrderingError (with sample and line/record index), ProtocolError,
// FramingError or ValidationError.
EventStream parse_stream(std::string_view bytes);

// Canonical encoding. Throws ValidationError when a sample breaks an
// invariant.
std::string serialize_stream(const EventStream& stream, StreamFormat format);

EventStream read_stream_file(const std::filesystem::path& path);
void write_stream_file(const std::filesystem::path& path, const EventStream& stream,
                       StreamFormat format);

// ---------------------------------------------------------------------------
// Validation report

enum class ViolationKind : std::uint8_t { kRange, kOrdering, kFraming, kTarget };

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::size_t sample = 0;
  std::size_t event = 0;
  ViolationKind kind = ViolationKind::kRange;
  std::string message;
};

struct SampleStats {
  std::size_t input_events = 0;
  std::uint32_t duration_ticks = 0;
  std::uint32_t peak_events_per_tick = 0;
  // Input events per tick over the sample duration.
  double rate = 0.0;
};

struct ValidationReport {
  std::vector<SampleStats> samples;
  std::vector<Violation> violations;
  std::uint64_t total_input_events = 0;
  std::uint64_t total_ticks = 0;
  std::uint32_t peak_events_per_tick = 0;

  bool ok() const { return violations.empty(); }
  double mean_rate() const {
    return total_ticks == 0 ? 0.0
                            : static_cast<double>(total_input_events) /
                                  static_cast<double>(total_ticks);
  }
};

// Report-only check of every sample against `cfg` (n_in, n_out, mode).
ValidationReport validate_stream(std::span<const Sample> samples,
                                 const NetworkConfig& cfg);

// ---------------------------------------------------------------------------
// Replay

// Where the replay reads events from. A live sensor would implement this
// interface; datasets use SampleSource.
class EventSource {
 public:
  virtual ~EventSource() = default;
  // Next event of the FIFO, or nullopt when the source is drained.
  virtual std::optional<Event> next() = 0;
};

class SampleSource : public EventSource {
 public:
  explicit SampleSource(const Sample& sample) : events_(sample.events) {}
  std::optional<Event> next() override {
    if (cursor_ == events_.size()) return std::nullopt;
    return events_[cursor_++];
  }

 private:
  std::span<const Event> events_;
  std::size_t cursor_ = 0;
};

struct ReplayOptions {
  std::uint32_t tick_budget = 1u << 20;
  // Called once per consumed event with its FIFO index and the tick at
  // which it was delivered.
  std::function<void(std::size_t, const Event&, std::uint32_t)> on_event;
  // Keep the readout vector of every tick in the outcome.
  bool record_readout = false;
};

struct ReplayOutcome {
  int decision = 0;
  std::vector<fx::Membrane> readout;
  std::vector<std::vector<fx::Membrane>> readout_per_tick;
  std::uint32_t ticks = 0;
  std::uint64_t events_consumed = 0;
  std::uint64_t input_events = 0;
  // Regression only: ticks with a target, and how many were within tolerance.
  std::uint64_t target_ticks = 0;
  std::uint64_t target_hits = 0;
  double squared_error = 0.0;
};

// Replays one sample from the FIFO into the core: asserts SAMPLE (core and
// traces reset), injects events with ts == t before tick t, advances the
// traces every tick and applies learning updates when enabled. Ends at the
// ae = -1 event. Throws RunawayError when more than tick_budget ticks would
// be needed.
ReplayOutcome replay_sample(EventSource& source, TaskMode mode, Core& core,
                            Eprop& eprop, const ReplayOptions& options = {},
                            std::int32_t regression_tolerance = 0);

ReplayOutcome replay_sample(const Sample& sample, Core& core, Eprop& eprop,
                            const ReplayOptions& options = {},
                            std::int32_t regression_tolerance = 0);

}  // namespace reckon

#endif  // RECKON_AER_HPP
