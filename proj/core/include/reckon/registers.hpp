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

// Register-mapped view of one emulated accelerator, standing in for its SPI
// configuration port. The address table is documented in docs/registers.md.

#ifndef RECKON_REGISTERS_HPP
#define RECKON_REGISTERS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "reckon/aer.hpp"
#include "reckon/config.hpp"
#include "reckon/core.hpp"
#include "reckon/eprop.hpp"
#include "reckon/weights.hpp"

namespace reckon {

namespace reg {
// Network configuration.
inline constexpr std::uint16_t kNIn = 0x000;
inline constexpr std::uint16_t kNRec = 0x001;
inline constexpr std::uint16_t kNOut = 0x002;
inline constexpr std::uint16_t kThreshold = 0x003;
inline constexpr std::uint16_t kLeakShift = 0x004;
inline constexpr std::uint16_t kReadoutLeakShift = 0x005;
inline constexpr std::uint16_t kResetMode = 0x006;
inline constexpr std::uint16_t kFracBits = 0x007;
inline constexpr std::uint16_t kMode = 0x008;
inline constexpr std::uint16_t kInitWeightRange = 0x009;
// Learning parameters.
inline constexpr std::uint16_t kLrShift = 0x010;
inline constexpr std::uint16_t kTraceShift = 0x011;
inline constexpr std::uint16_t kSurrogateWidth = 0x012;
inline constexpr std::uint16_t kFeedbackSeedLo = 0x013;
inline constexpr std::uint16_t kFeedbackSeedHi = 0x014;
inline constexpr std::uint16_t kFeedbackRange = 0x015;
inline constexpr std::uint16_t kLearnEnable = 0x016;
inline constexpr std::uint16_t kUpdateGranularity = 0x017;
// Weight memory command space.
inline constexpr std::uint16_t kWeightMatrix = 0x020;
inline constexpr std::uint16_t kWeightRow = 0x021;
inline constexpr std::uint16_t kWeightCol = 0x022;
inline constexpr std::uint16_t kWeightData = 0x023;
// Status, read-only.
inline constexpr std::uint16_t kStatusTick = 0x030;
inline constexpr std::uint16_t kStatusSampleActive = 0x031;
inline constexpr std::uint16_t kStatusSkipLo = 0x032;
inline constexpr std::uint16_t kStatusSkipHi = 0x033;
inline constexpr std::uint16_t kStatusSatLo = 0x034;
inline constexpr std::uint16_t kStatusSatHi = 0x035;
}  // namespace reg

enum class RegAccess : std::uint8_t { kConfig, kCommand, kStatus };

struct RegisterInfo {
  std::uint16_t addr;
  std::string_view name;
  RegAccess access;
};

std::span<const RegisterInfo> register_table();
std::optional<RegisterInfo> find_register(std::uint16_t addr);
std::optional<RegisterInfo> find_register(std::string_view name);

class Device {
 public:
  explicit Device(const NetworkConfig& cfg = {}, const LearnParams& params = {});

  // Throws AddressError for unknown or read-only addresses, BusyError for
  // configuration writes while a sample is active and ConfigError when the
  // value is out of range for the field. A rejected write changes nothing.
  void write_reg(std::uint16_t addr, std::uint32_t value);
  std::uint32_t read_reg(std::uint16_t addr) const;

  // Dense row-major load of one weight memory. Throws ShapeError when the
  // payload does not match the topology.
  void load_weights(MatrixId id, const WeightMatrix& payload);
  void load_weights(MatrixId id, int rows, int cols, std::span<const fx::Weight> payload);
  WeightMatrix dump_weights(MatrixId id) const;

  // SAMPLE signal.
  void begin_sample();
  void end_sample();
  bool sample_active() const { return sample_active_; }

  // begin_sample + replay + end_sample.
  ReplayOutcome run_sample(const Sample& sample, const ReplayOptions& options = {},
                           std::int32_t regression_tolerance = 0);

  const NetworkConfig& config() const { return core_.config(); }
  const LearnParams& learn_params() const { return eprop_.params(); }
  const Core& core() const { return core_; }
  Core& core() { return core_; }
  const Eprop& eprop() const { return eprop_; }
  Eprop& eprop() { return eprop_; }

 private:
  void apply_network(const NetworkConfig& cfg);
  void apply_learning(const LearnParams& params);
  void require_idle(std::string_view what) const;
  fx::Weight& selected_weight();
  const fx::Weight& selected_weight() const;

  Core core_;
  Eprop eprop_;
  bool sample_active_ = false;
  std::uint32_t weight_matrix_ = 0;
  std::uint32_t weight_row_ = 0;
  std::uint32_t weight_col_ = 0;
};

// ---------------------------------------------------------------------------
// Weight checkpoint file (little endian):
//
//   0  char[4] "RCKW"
//   4  u16     version (1)
//   6  u16     n_in
//   8  u16     n_rec
//   10 u16     n_out
//   12 u8      frac_bits
//   13 u8[3]   reserved, zero
//   16 i8[n_in * n_rec]   input weights, row-major
//      i8[n_rec * n_rec]  recurrent weights, row-major
//      i8[n_rec * n_out]  output weights, row-major

struct Checkpoint {
  int n_in = 0;
  int n_rec = 0;
  int n_out = 0;
  int frac_bits = 0;
  WeightMemories weights;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint make_checkpoint(const NetworkConfig& cfg, const WeightMemories& weights);
std::string encode_checkpoint(const Checkpoint& ckpt);
// Throws ValidationError for malformed bytes.
Checkpoint decode_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Loads all three memories of `ckpt` into `device`; throws ShapeError when
// the checkpoint topology differs from the device's.
void restore_checkpoint(Device& device, const Checkpoint& ckpt);

}  // namespace reckon

#endif  // RECKON_REGISTERS_HPP
