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

#include "reckon/registers.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "reckon/errors.hpp"

namespace reckon {
namespace {

constexpr std::array<RegisterInfo, 28> kRegisters{{
    {reg::kNIn, "n_in", RegAccess::kConfig},
    {reg::kNRec, "n_rec", RegAccess::kConfig},
    {reg::kNOut, "n_out", RegAccess::kConfig},
    {reg::kThreshold, "threshold", RegAccess::kConfig},
    {reg::kLeakShift, "leak_shift", RegAccess::kConfig},
    {reg::kReadoutLeakShift, "readout_leak_shift", RegAccess::kConfig},
    {reg::kResetMode, "reset_mode", RegAccess::kConfig},
    {reg::kFracBits, "frac_bits", RegAccess::kConfig},
    {reg::kMode, "mode", RegAccess::kConfig},
    {reg::kInitWeightRange, "init_weight_range", RegAccess::kConfig},
    {reg::kLrShift, "lr_shift", RegAccess::kConfig},
    {reg::kTraceShift, "trace_shift", RegAccess::kConfig},
    {reg::kSurrogateWidth, "surrogate_width", RegAccess::kConfig},
    {reg::kFeedbackSeedLo, "feedback_seed_lo", RegAccess::kConfig},
    {reg::kFeedbackSeedHi, "feedback_seed_hi", RegAccess::kConfig},
    {reg::kFeedbackRange, "feedback_range", RegAccess::kConfig},
    {reg::kLearnEnable, "learn_enable", RegAccess::kConfig},
    {reg::kUpdateGranularity, "update_granularity", RegAccess::kConfig},
    {reg::kWeightMatrix, "weight_matrix", RegAccess::kCommand},
    {reg::kWeightRow, "weight_row", RegAccess::kCommand},
    {reg::kWeightCol, "weight_col", RegAccess::kCommand},
    {reg::kWeightData, "weight_data", RegAccess::kCommand},
    {reg::kStatusTick, "status_tick", RegAccess::kStatus},
    {reg::kStatusSampleActive, "status_sample_active", RegAccess::kStatus},
    {reg::kStatusSkipLo, "status_skip_lo", RegAccess::kStatus},
    {reg::kStatusSkipHi, "status_skip_hi", RegAccess::kStatus},
    {reg::kStatusSatLo, "status_sat_lo", RegAccess::kStatus},
    {reg::kStatusSatHi, "status_sat_hi", RegAccess::kStatus},
}};

constexpr char kCheckpointMagic[4] = {'R', 'C', 'K', 'W'};
constexpr std::uint16_t kCheckpointVersion = 1;
constexpr std::size_t kCheckpointHeaderSize = 16;

std::string hex(std::uint16_t addr) {
  std::ostringstream os;
  os << "0x" << std::hex << addr;
  return os.str();
}

int as_int(std::uint32_t v) { return static_cast<int>(static_cast<std::int32_t>(v)); }

std::uint64_t saturation_total(const Core& core, const Eprop& eprop) {
  return core.counters().saturations() + eprop.counters().weight_saturations;
}

}  // namespace

std::span<const RegisterInfo> register_table() { return kRegisters; }

std::optional<RegisterInfo> find_register(std::uint16_t addr) {
  for (const auto& r : kRegisters) {
    if (r.addr == addr) return r;
  }
  return std::nullopt;
}

std::optional<RegisterInfo> find_register(std::string_view name) {
  for (const auto& r : kRegisters) {
    if (r.name == name) return r;
  }
  return std::nullopt;
}

Device::Device(const NetworkConfig& cfg, const LearnParams& params)
    : core_(cfg, WeightMemories::zeros(cfg)), eprop_(cfg, params) {}

void Device::require_idle(std::string_view what) const {
  if (sample_active_) {
    throw BusyError("cannot write " + std::string(what) + " while a sample is active");
  }
}

void Device::apply_network(const NetworkConfig& cfg) {
  cfg.validate();
  const NetworkConfig& cur = core_.config();
  if (cfg.n_in != cur.n_in || cfg.n_rec != cur.n_rec || cfg.n_out != cur.n_out) {
    // New topology: memories come back zeroed, feedback is redrawn.
    Core fresh(cfg, WeightMemories::zeros(cfg));
    Eprop fresh_eprop(cfg, eprop_.params());
    core_ = std::move(fresh);
    eprop_ = std::move(fresh_eprop);
    return;
  }
  core_.set_config(cfg);
  eprop_.set_network(cfg);
}

void Device::apply_learning(const LearnParams& params) { eprop_.set_params(params); }

void Device::write_reg(std::uint16_t addr, std::uint32_t value) {
  const auto info = find_register(addr);
  if (!info) throw AddressError("unknown register " + hex(addr));
  if (info->access == RegAccess::kStatus) {
    throw AddressError("register " + std::string(info->name) + " is read-only");
  }
  require_idle(info->name);

  if (info->access == RegAccess::kCommand) {
    switch (addr) {
      case reg::kWeightMatrix:
        if (value > 2) throw ConfigError("weight_matrix must be 0, 1 or 2");
        weight_matrix_ = value;
        return;
      case reg::kWeightRow:
        weight_row_ = value;
        return;
      case reg::kWeightCol:
        weight_col_ = value;
        return;
      case reg::kWeightData: {
        const int w = as_int(value);
        if (w < -128 || w > 127) throw ConfigError("weight value outside -128..127");
        selected_weight() = static_cast<fx::Weight>(w);
        return;
      }
      default:
        break;
    }
    throw AddressError("unhandled command register " + hex(addr));
  }

  NetworkConfig cfg = core_.config();
  LearnParams lp = eprop_.params();
  switch (addr) {
    case reg::kNIn: cfg.n_in = as_int(value); break;
    case reg::kNRec: cfg.n_rec = as_int(value); break;
    case reg::kNOut: cfg.n_out = as_int(value); break;
    case reg::kThreshold: cfg.threshold = as_int(value); break;
    case reg::kLeakShift: cfg.leak_shift = as_int(value); break;
    case reg::kReadoutLeakShift: cfg.readout_leak_shift = as_int(value); break;
    case reg::kResetMode:
      if (value > 1) throw ConfigError("reset_mode must be 0 or 1");
      cfg.reset_mode = static_cast<ResetMode>(value);
      break;
    case reg::kFracBits: cfg.frac_bits = as_int(value); break;
    case reg::kMode:
      if (value > 1) throw ConfigError("mode must be 0 or 1");
      cfg.mode = static_cast<TaskMode>(value);
      break;
    case reg::kInitWeightRange: cfg.init_weight_range = as_int(value); break;
    case reg::kLrShift: lp.lr_shift = as_int(value); break;
    case reg::kTraceShift: lp.trace_shift = as_int(value); break;
    case reg::kSurrogateWidth: lp.surrogate_width = as_int(value); break;
    case reg::kFeedbackSeedLo:
      lp.feedback_seed = (lp.feedback_seed & 0xFFFFFFFF00000000ULL) | value;
      break;
    case reg::kFeedbackSeedHi:
      lp.feedback_seed = (lp.feedback_seed & 0xFFFFFFFFULL) |
                         (static_cast<std::uint64_t>(value) << 32);
      break;
    case reg::kFeedbackRange: lp.feedback_range = as_int(value); break;
    case reg::kLearnEnable:
      if (value > 1) throw ConfigError("learn_enable must be 0 or 1");
      lp.enabled = value == 1;
      break;
    case reg::kUpdateGranularity:
      if (value > 1) throw ConfigError("update_granularity must be 0 or 1");
      lp.granularity = static_cast<UpdateGranularity>(value);
      break;
    default:
      throw AddressError("unhandled config register " + hex(addr));
  }
  if (addr < reg::kLrShift) {
    apply_network(cfg);
  } else {
    apply_learning(lp);
  }
}

std::uint32_t Device::read_reg(std::uint16_t addr) const {
  const auto info = find_register(addr);
  if (!info) throw AddressError("unknown register " + hex(addr));
  const NetworkConfig& cfg = core_.config();
  const LearnParams& lp = eprop_.params();
  auto u = [](std::int64_t v) { return static_cast<std::uint32_t>(v); };
  switch (addr) {
    case reg::kNIn: return u(cfg.n_in);
    case reg::kNRec: return u(cfg.n_rec);
    case reg::kNOut: return u(cfg.n_out);
    case reg::kThreshold: return u(cfg.threshold);
    case reg::kLeakShift: return u(cfg.leak_shift);
    case reg::kReadoutLeakShift: return u(cfg.readout_leak_shift);
    case reg::kResetMode: return static_cast<std::uint32_t>(cfg.reset_mode);
    case reg::kFracBits: return u(cfg.frac_bits);
    case reg::kMode: return static_cast<std::uint32_t>(cfg.mode);
    case reg::kInitWeightRange: return u(cfg.init_weight_range);
    case reg::kLrShift: return u(lp.lr_shift);
    case reg::kTraceShift: return u(lp.trace_shift);
    case reg::kSurrogateWidth: return u(lp.surrogate_width);
    case reg::kFeedbackSeedLo: return static_cast<std::uint32_t>(lp.feedback_seed);
    case reg::kFeedbackSeedHi: return static_cast<std::uint32_t>(lp.feedback_seed >> 32);
    case reg::kFeedbackRange: return u(lp.feedback_range);
    case reg::kLearnEnable: return lp.enabled ? 1u : 0u;
    case reg::kUpdateGranularity: return static_cast<std::uint32_t>(lp.granularity);
    case reg::kWeightMatrix: return weight_matrix_;
    case reg::kWeightRow: return weight_row_;
    case reg::kWeightCol: return weight_col_;
    case reg::kWeightData: return u(selected_weight());
    case reg::kStatusTick: return core_.state().tick;
    case reg::kStatusSampleActive: return sample_active_ ? 1u : 0u;
    case reg::kStatusSkipLo: return static_cast<std::uint32_t>(eprop_.counters().skipped);
    case reg::kStatusSkipHi: return static_cast<std::uint32_t>(eprop_.counters().skipped >> 32);
    case reg::kStatusSatLo: return static_cast<std::uint32_t>(saturation_total(core_, eprop_));
    case reg::kStatusSatHi:
      return static_cast<std::uint32_t>(saturation_total(core_, eprop_) >> 32);
    default:
      break;
  }
  throw AddressError("unhandled register " + hex(addr));
}

fx::Weight& Device::selected_weight() {
  WeightMatrix& m = core_.weights().matrix(static_cast<MatrixId>(weight_matrix_));
  if (weight_row_ >= static_cast<std::uint32_t>(m.rows()) ||
      weight_col_ >= static_cast<std::uint32_t>(m.cols())) {
    throw AddressError("weight address (" + std::to_string(weight_row_) + ", " +
                       std::to_string(weight_col_) + ") outside the " +
                       std::string(to_string(static_cast<MatrixId>(weight_matrix_))) +
                       " memory");
  }
  return m.at(static_cast<int>(weight_row_), static_cast<int>(weight_col_));
}

const fx::Weight& Device::selected_weight() const {
  return const_cast<Device*>(this)->selected_weight();
}

void Device::load_weights(MatrixId id, const WeightMatrix& payload) {
  load_weights(id, payload.rows(), payload.cols(), payload.data());
}

void Device::load_weights(MatrixId id, int rows, int cols,
                          std::span<const fx::Weight> payload) {
  require_idle("weights");
  WeightMatrix& m = core_.weights().matrix(id);
  if (rows != m.rows() || cols != m.cols() ||
      payload.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError(std::string(to_string(id)) + " payload is " + std::to_string(rows) +
                     "x" + std::to_string(cols) + " (" + std::to_string(payload.size()) +
                     " values), memory is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  std::copy(payload.begin(), payload.end(), m.data().begin());
}

WeightMatrix Device::dump_weights(MatrixId id) const { return core_.weights().matrix(id); }

void Device::begin_sample() {
  core_.reset_sample();
  eprop_.reset_sample();
  sample_active_ = true;
}

void Device::end_sample() { sample_active_ = false; }

ReplayOutcome Device::run_sample(const Sample& sample, const ReplayOptions& options,
                                 std::int32_t regression_tolerance) {
  begin_sample();
  try {
    ReplayOutcome out = replay_sample(sample, core_, eprop_, options, regression_tolerance);
    end_sample();
    return out;
  } catch (...) {
    end_sample();
    throw;
  }
}

// ---------------------------------------------------------------------------

Checkpoint make_checkpoint(const NetworkConfig& cfg, const WeightMemories& weights) {
  return Checkpoint{cfg.n_in, cfg.n_rec, cfg.n_out, cfg.frac_bits, weights};
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  std::string out;
  out.append(kCheckpointMagic, 4);
  auto u16 = [&](std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
  };
  u16(kCheckpointVersion);
  u16(static_cast<std::uint32_t>(ckpt.n_in));
  u16(static_cast<std::uint32_t>(ckpt.n_rec));
  u16(static_cast<std::uint32_t>(ckpt.n_out));
  out.push_back(static_cast<char>(ckpt.frac_bits));
  out.append(3, '\0');
  for (const WeightMatrix* m : {&ckpt.weights.w_inp, &ckpt.weights.w_rec, &ckpt.weights.w_out}) {
    for (fx::Weight w : m->data()) out.push_back(static_cast<char>(w));
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  if (bytes.size() < kCheckpointHeaderSize ||
      std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw ValidationError("not a weight checkpoint");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  auto u16 = [&](std::size_t off) { return static_cast<int>(p[off] | (p[off + 1] << 8)); };
  if (u16(4) != kCheckpointVersion) {
    throw ValidationError("unsupported checkpoint version " + std::to_string(u16(4)));
  }
  Checkpoint ckpt;
  ckpt.n_in = u16(6);
  ckpt.n_rec = u16(8);
  ckpt.n_out = u16(10);
  ckpt.frac_bits = p[12];
  NetworkConfig cfg;
  cfg.n_in = ckpt.n_in;
  cfg.n_rec = ckpt.n_rec;
  cfg.n_out = ckpt.n_out;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ValidationError(std::string("checkpoint topology invalid: ") + e.what());
  }
  ckpt.weights = WeightMemories::zeros(cfg);
  const std::size_t expected = kCheckpointHeaderSize + ckpt.weights.synapse_count();
  if (bytes.size() != expected) {
    throw ValidationError("checkpoint holds " + std::to_string(bytes.size()) +
                          " bytes, topology needs " + std::to_string(expected));
  }
  std::size_t off = kCheckpointHeaderSize;
  for (WeightMatrix* m : {&ckpt.weights.w_inp, &ckpt.weights.w_rec, &ckpt.weights.w_out}) {
    for (fx::Weight& w : m->data()) w = static_cast<fx::Weight>(p[off++]);
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::string bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

void restore_checkpoint(Device& device, const Checkpoint& ckpt) {
  const NetworkConfig& cfg = device.config();
  if (ckpt.n_in != cfg.n_in || ckpt.n_rec != cfg.n_rec || ckpt.n_out != cfg.n_out) {
    throw ShapeError("checkpoint topology " + std::to_string(ckpt.n_in) + "-" +
                     std::to_string(ckpt.n_rec) + "-" + std::to_string(ckpt.n_out) +
                     " does not match device " + std::to_string(cfg.n_in) + "-" +
                     std::to_string(cfg.n_rec) + "-" + std::to_string(cfg.n_out));
  }
  device.load_weights(MatrixId::kInput, ckpt.weights.w_inp);
  device.load_weights(MatrixId::kRecurrent, ckpt.weights.w_rec);
  device.load_weights(MatrixId::kOutput, ckpt.weights.w_out);
}

}  // namespace reckon
