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

#include "reckon/aer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "reckon/errors.hpp"

namespace reckon {
namespace {

constexpr char kMagic[4] = {'A', 'E', 'R', 'S'};
constexpr std::size_t kBinaryHeaderSize = 16;

// Sample-level invariants shared by the parser, serializer and validator.
// `n_out` of zero skips the label-range check.
std::vector<Violation> check_sample(const Sample& s, std::size_t index, int n_in,
                                    TaskMode mode, int n_out) {
  std::vector<Violation> out;
  auto flag = [&](std::size_t event, ViolationKind kind, std::string msg) {
    out.push_back(Violation{index, event, kind,
                            "sample " + std::to_string(index) + ", event " +
                                std::to_string(event) + ": " + std::move(msg)});
  };

  const auto& ev = s.events;
  if (ev.empty() || !ev.back().is_end()) {
    flag(ev.size(), ViolationKind::kFraming, "missing end-of-sample event");
  }
  const std::uint32_t end_ts = !ev.empty() && ev.back().is_end() ? ev.back().ts : 0;

  std::size_t targets = 0;
  std::optional<std::int32_t> label;
  std::uint32_t target_run_ts = 0;
  int target_run = 0;
  for (std::size_t p = 0; p < ev.size(); ++p) {
    const Event& e = ev[p];
    if (p > 0 && e.ts < ev[p - 1].ts) {
      flag(p, ViolationKind::kOrdering,
           "timestamp " + std::to_string(e.ts) + " after " + std::to_string(ev[p - 1].ts));
    }
    if (e.ae < kTargetAddress) {
      flag(p, ViolationKind::kRange, "address " + std::to_string(e.ae) + " is not a valid code");
    } else if (e.ae >= n_in) {
      flag(p, ViolationKind::kRange,
           "address " + std::to_string(e.ae) + " outside 0.." + std::to_string(n_in - 1));
    }
    if (e.is_target() != e.payload.has_value()) {
      flag(p, ViolationKind::kTarget, "payload must be present exactly on target events");
    }
    if (e.is_end() && p + 1 != ev.size()) {
      flag(p, ViolationKind::kFraming, "end-of-sample event before the last event");
    }
    if (e.is_input() && !ev.empty() && ev.back().is_end() && e.ts >= end_ts) {
      flag(p, ViolationKind::kFraming,
           "input event at tick " + std::to_string(e.ts) + " not before the sample end " +
               std::to_string(end_ts));
    }
    if (e.is_target()) {
      ++targets;
      if (e.payload) label = *e.payload;
      if (target_run == 0 || e.ts != target_run_ts) {
        target_run_ts = e.ts;
        target_run = 0;
      }
      ++target_run;
      if (mode == TaskMode::kRegression && n_out > 0 && target_run > n_out) {
        flag(p, ViolationKind::kTarget,
             "more than " + std::to_string(n_out) + " regression targets on one tick");
      }
    }
  }

  if (mode == TaskMode::kClassification) {
    if (targets != 1) {
      flag(ev.size(), ViolationKind::kTarget,
           "classification sample needs exactly one target event, found " +
               std::to_string(targets));
    } else if (label) {
      if (*label < 0 || (n_out > 0 && *label >= n_out)) {
        flag(ev.size(), ViolationKind::kTarget,
             "class label " + std::to_string(*label) + " out of range");
      } else if (s.target.kind != TargetKind::kClassLabel || s.target.label != *label) {
        flag(ev.size(), ViolationKind::kTarget, "target does not match the target event");
      }
    }
  }
  if (!ev.empty() && ev.back().is_end() && s.duration_ticks != end_ts) {
    flag(ev.size() - 1, ViolationKind::kFraming,
         "duration " + std::to_string(s.duration_ticks) + " differs from end tick " +
             std::to_string(end_ts));
  }
  return out;
}

[[noreturn]] void raise(const Violation& v) {
  switch (v.kind) {
    case ViolationKind::kOrdering:
      throw OrderingError(v.message);
    case ViolationKind::kRange:
      throw ProtocolError(v.message);
    case ViolationKind::kFraming:
    case ViolationKind::kTarget:
      throw FramingError(v.message);
  }
  throw FramingError(v.message);
}

Sample frame_sample(std::vector<Event> events, TaskMode mode, std::size_t index) {
  Sample s;
  s.events = std::move(events);
  if (mode == TaskMode::kClassification) {
    s.target = TargetSignal::class_label(0);
    for (const Event& e : s.events) {
      if (e.is_target() && e.payload) {
        s.target.label = *e.payload;
        break;
      }
    }
  } else {
    s.target = TargetSignal::regression({});
  }
  if (!s.events.empty() && s.events.back().is_end()) {
    s.duration_ticks = s.events.back().ts;
  }
  // Address range is checked by the caller against its own n_in.
  auto violations = check_sample(s, index, kMaxInputs + 1, mode, 0);
  if (!violations.empty()) raise(violations.front());
  return s;
}

void check_header(const StreamHeader& h) {
  if (h.version != kStreamVersion) {
    throw ValidationError("unsupported stream version " + std::to_string(h.version));
  }
  if (h.n_in < 1 || h.n_in > kMaxInputs) {
    throw ValidationError("stream n_in must be in 1.." + std::to_string(kMaxInputs));
  }
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

// Incremental framer shared by both decoders.
class StreamBuilder {
 public:
  explicit StreamBuilder(EventStream& stream) : stream_(stream) {}

  void push(const Event& e, const std::string& where) {
    const std::size_t sample = stream_.samples.size();
    if (e.ae < kTargetAddress || e.ae >= stream_.header.n_in) {
      throw ProtocolError(where + ": address " + std::to_string(e.ae) + " outside 0.." +
                          std::to_string(stream_.header.n_in - 1) +
                          " and not a control code (sample " + std::to_string(sample) + ")");
    }
    if (!pending_.empty() && e.ts < pending_.back().ts) {
      throw OrderingError(where + ": timestamp " + std::to_string(e.ts) +
                          " decreases from " + std::to_string(pending_.back().ts) +
                          " in sample " + std::to_string(sample));
    }
    pending_.push_back(e);
    if (e.is_end()) {
      stream_.samples.push_back(frame_sample(std::move(pending_), stream_.header.mode, sample));
      pending_.clear();
    }
  }

  void finish() {
    if (!pending_.empty()) {
      throw FramingError("sample " + std::to_string(stream_.samples.size()) +
                         " has no end-of-sample event");
    }
  }

 private:
  EventStream& stream_;
  std::vector<Event> pending_;
};

EventStream parse_text(std::string_view text) {
  EventStream stream;
  bool have_version = false;
  bool have_n_in = false;
  bool in_body = false;
  StreamBuilder builder(stream);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tokens = split_tokens(line);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no);
    auto malformed = [&]() -> ValidationError {
      return ValidationError(where + ": malformed record '" + std::string(line) + "'");
    };

    const std::string_view tag = tokens[0];
    if (tag.front() == '!') {
      if (in_body) throw ValidationError(where + ": header line after events");
      if (tokens.size() != 2) throw malformed();
      const std::string_view value = tokens[1];
      if (tag == "!version") {
        if (!parse_number(value, stream.header.version)) throw malformed();
        have_version = true;
      } else if (tag == "!n_in") {
        if (!parse_number(value, stream.header.n_in)) throw malformed();
        have_n_in = true;
      } else if (tag == "!tick_us") {
        if (!parse_number(value, stream.header.tick_us)) throw malformed();
      } else if (tag == "!mode") {
        try {
          stream.header.mode = parse_task_mode(value);
        } catch (const ConfigError&) {
          throw malformed();
        }
      } else {
        throw ValidationError(where + ": unknown header key '" + std::string(tag) + "'");
      }
      continue;
    }

    if (!in_body) {
      if (!have_version || !have_n_in) {
        throw ValidationError(where + ": events before the !version and !n_in header lines");
      }
      check_header(stream.header);
      in_body = true;
    }

    Event e;
    if (tag == "E") {
      if (tokens.size() != 3 || !parse_number(tokens[1], e.ae) ||
          !parse_number(tokens[2], e.ts)) {
        throw malformed();
      }
      if (e.ae < 0) {
        throw ProtocolError(where + ": input address " + std::to_string(e.ae) +
                            " is negative; control codes use T and X records");
      }
    } else if (tag == "T") {
      std::int32_t value = 0;
      if (tokens.size() != 3 || !parse_number(tokens[1], e.ts) ||
          !parse_number(tokens[2], value)) {
        throw malformed();
      }
      e.ae = kTargetAddress;
      e.payload = value;
    } else if (tag == "X") {
      if (tokens.size() != 2 || !parse_number(tokens[1], e.ts)) throw malformed();
      e.ae = kEndAddress;
    } else {
      throw malformed();
    }
    builder.push(e, where);
  }

  if (!in_body) {
    if (!have_version || !have_n_in) {
      throw ValidationError("stream header needs !version and !n_in");
    }
    check_header(stream.header);
  }
  builder.finish();
  return stream;
}

template <typename T>
T load_le(const unsigned char* p) {
  std::make_unsigned_t<T> v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    v |= static_cast<std::make_unsigned_t<T>>(p[b]) << (8 * b);
  }
  return static_cast<T>(v);
}

template <typename T>
void store_le(std::string& out, T value) {
  auto v = static_cast<std::make_unsigned_t<T>>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
  }
}

EventStream parse_binary(std::string_view bytes) {
  if (bytes.size() < kBinaryHeaderSize) {
    throw ValidationError("binary stream shorter than its header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EventStream stream;
  stream.header.version = load_le<std::uint16_t>(p + 4);
  stream.header.n_in = load_le<std::uint16_t>(p + 6);
  stream.header.tick_us = load_le<std::uint32_t>(p + 8);
  const std::uint8_t mode = p[12];
  if (mode > 1) throw ValidationError("binary stream has unknown mode " + std::to_string(mode));
  stream.header.mode = static_cast<TaskMode>(mode);
  if (p[13] != 0 || p[14] != 0 || p[15] != 0) {
    throw ValidationError("binary stream reserved header bytes must be zero");
  }
  check_header(stream.header);

  StreamBuilder builder(stream);
  std::size_t off = kBinaryHeaderSize;
  std::size_t record = 0;
  while (off < bytes.size()) {
    const std::string where = "record " + std::to_string(record);
    if (bytes.size() - off < 8) throw ValidationError(where + ": truncated");
    Event e;
    e.ae = load_le<std::int32_t>(p + off);
    e.ts = load_le<std::uint32_t>(p + off + 4);
    off += 8;
    if (e.is_target()) {
      if (bytes.size() - off < 4) throw ValidationError(where + ": truncated payload");
      e.payload = load_le<std::int32_t>(p + off);
      off += 4;
    }
    builder.push(e, where);
    ++record;
  }
  builder.finish();
  return stream;
}

void check_for_serialization(const EventStream& stream) {
  check_header(stream.header);
  for (std::size_t i = 0; i < stream.samples.size(); ++i) {
    auto v = check_sample(stream.samples[i], i, stream.header.n_in, stream.header.mode, 0);
    if (!v.empty()) throw ValidationError(v.front().message);
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Sample Sample::from_events(std::vector<Event> events, TaskMode mode) {
  return frame_sample(std::move(events), mode, 0);
}

std::size_t Sample::input_event_count() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const Event& e) { return e.is_input(); }));
}

StreamFormat parse_stream_format(std::string_view s) {
  if (s == "text") return StreamFormat::kText;
  if (s == "binary") return StreamFormat::kBinary;
  throw ConfigError("unknown stream format '" + std::string(s) + "'");
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kRange:
      return "range";
    case ViolationKind::kOrdering:
      return "ordering";
    case ViolationKind::kFraming:
      return "framing";
    case ViolationKind::kTarget:
      return "target";
  }
  return "unknown";
}

EventStream parse_stream(std::string_view bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
    return parse_binary(bytes);
  }
  return parse_text(bytes);
}

std::string serialize_stream(const EventStream& stream, StreamFormat format) {
  check_for_serialization(stream);
  std::string out;
  const StreamHeader& h = stream.header;
  if (format == StreamFormat::kText) {
    out += "!version " + std::to_string(h.version) + "\n";
    out += "!n_in " + std::to_string(h.n_in) + "\n";
    out += "!tick_us " + std::to_string(h.tick_us) + "\n";
    out += "!mode " + std::string(to_string(h.mode)) + "\n";
    for (const Sample& s : stream.samples) {
      for (const Event& e : s.events) {
        if (e.is_input()) {
          out += "E " + std::to_string(e.ae) + " " + std::to_string(e.ts) + "\n";
        } else if (e.is_target()) {
          out += "T " + std::to_string(e.ts) + " " + std::to_string(*e.payload) + "\n";
        } else {
          out += "X " + std::to_string(e.ts) + "\n";
        }
      }
    }
    return out;
  }

  out.append(kMagic, 4);
  store_le<std::uint16_t>(out, h.version);
  store_le<std::uint16_t>(out, static_cast<std::uint16_t>(h.n_in));
  store_le<std::uint32_t>(out, h.tick_us);
  out.push_back(static_cast<char>(h.mode));
  out.append(3, '\0');
  for (const Sample& s : stream.samples) {
    for (const Event& e : s.events) {
      store_le<std::int32_t>(out, e.ae);
      store_le<std::uint32_t>(out, e.ts);
      if (e.is_target()) store_le<std::int32_t>(out, *e.payload);
    }
  }
  return out;
}

EventStream read_stream_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open event stream " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stream(buf.str());
}

void write_stream_file(const std::filesystem::path& path, const EventStream& stream,
                       StreamFormat format) {
  const std::string bytes = serialize_stream(stream, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write event stream " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ValidationReport validate_stream(std::span<const Sample> samples, const NetworkConfig& cfg) {
  ValidationReport report;
  report.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    SampleStats stats;
    stats.duration_ticks = s.duration_ticks;
    std::uint32_t run_ts = 0;
    std::uint32_t run = 0;
    for (const Event& e : s.events) {
      if (!e.is_input()) continue;
      ++stats.input_events;
      if (run == 0 || e.ts != run_ts) {
        run_ts = e.ts;
        run = 0;
      }
      stats.peak_events_per_tick = std::max(stats.peak_events_per_tick, ++run);
    }
    stats.rate = s.duration_ticks == 0
                     ? 0.0
                     : static_cast<double>(stats.input_events) / s.duration_ticks;
    report.total_input_events += stats.input_events;
    report.total_ticks += s.duration_ticks;
    report.peak_events_per_tick =
        std::max(report.peak_events_per_tick, stats.peak_events_per_tick);
    report.samples.push_back(stats);

    auto v = check_sample(s, i, cfg.n_in, cfg.mode, cfg.n_out);
    report.violations.insert(report.violations.end(), std::make_move_iterator(v.begin()),
                             std::make_move_iterator(v.end()));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Replay: the reader side pulls from the FIFO, the sender side paces events
// onto ticks.

ReplayOutcome replay_sample(EventSource& source, TaskMode mode, Core& core, Eprop& eprop,
                            const ReplayOptions& options,
                            std::int32_t regression_tolerance) {
  const NetworkConfig& cfg = core.config();
  core.reset_sample();
  eprop.reset_sample();

  ReplayOutcome out;
  const bool classification = mode == TaskMode::kClassification;
  const bool per_tick = eprop.params().granularity == UpdateGranularity::kPerTick;
  TargetSignal target = classification
                            ? TargetSignal::class_label(0)
                            : TargetSignal::regression(std::vector<std::int32_t>(
                                  static_cast<std::size_t>(cfg.n_out), 0));
  bool have_target = false;

  std::vector<int> inputs;
  inputs.reserve(static_cast<std::size_t>(cfg.n_in));
  std::optional<Event> next = source.next();
  std::uint32_t last_ts = 0;

  for (std::uint32_t t = 0;; ++t) {
    inputs.clear();
    int target_slot = 0;
    while (next && next->ts == t && !next->is_end()) {
      const Event& e = *next;
      if (options.on_event) options.on_event(out.events_consumed, e, t);
      if (e.is_input()) {
        core.inject_input_spike(e.ae);
        inputs.push_back(e.ae);
        ++out.input_events;
      } else if (e.is_target()) {
        if (!e.payload) throw ProtocolError("target event without payload");
        if (classification) {
          target.label = *e.payload;
        } else {
          if (target_slot >= cfg.n_out) {
            throw ProtocolError("more regression targets than readouts at tick " +
                                std::to_string(t));
          }
          target.values[static_cast<std::size_t>(target_slot++)] = *e.payload;
        }
        have_target = true;
      } else {
        throw ProtocolError("invalid address " + std::to_string(e.ae));
      }
      last_ts = e.ts;
      ++out.events_consumed;
      next = source.next();
    }
    if (!next) throw FramingError("event source drained without an end-of-sample event");
    if (next->ts < t || next->ts < last_ts) {
      throw OrderingError("event at tick " + std::to_string(next->ts) +
                          " arrived after tick " + std::to_string(t));
    }
    if (next->is_end() && next->ts == t) {
      if (options.on_event) options.on_event(out.events_consumed, *next, t);
      ++out.events_consumed;
      break;
    }
    if (t >= options.tick_budget) {
      throw RunawayError("sample exceeded its budget of " +
                         std::to_string(options.tick_budget) + " ticks");
    }

    const TickOutput tick = core.step_tick();
    eprop.advance_traces(tick.spikes, inputs, core.state());
    ++out.ticks;
    if (options.record_readout) {
      out.readout_per_tick.emplace_back(tick.y.begin(), tick.y.end());
    }
    if (!classification && have_target) {
      ++out.target_ticks;
      bool hit = true;
      for (int k = 0; k < cfg.n_out; ++k) {
        const double d = static_cast<double>(target.values[k]) - tick.y[k];
        out.squared_error += d * d;
        if (std::abs(d) > regression_tolerance) hit = false;
      }
      if (hit) ++out.target_hits;
    }
    if (per_tick && have_target && eprop.learning()) {
      eprop.compute_error(tick.y, target);
      eprop.apply_update(core.weights());
    }
  }

  const auto& y = core.state().y;
  out.readout.assign(y.begin(), y.end());
  out.decision = argmax_readout(y);
  if (!per_tick && have_target && eprop.learning()) {
    eprop.compute_error(y, target);
    eprop.apply_update(core.weights());
  }
  return out;
}

ReplayOutcome replay_sample(const Sample& sample, Core& core, Eprop& eprop,
                            const ReplayOptions& options,
                            std::int32_t regression_tolerance) {
  SampleSource source(sample);
  const TaskMode mode = sample.target.kind == TargetKind::kClassLabel
                            ? TaskMode::kClassification
                            : TaskMode::kRegression;
  return replay_sample(source, mode, core, eprop, options, regression_tolerance);
}

}  // namespace reckon
