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

#include <set>

#include "doctest.h"
#include "reckon/errors.hpp"
#include "reckon/harness.hpp"
#include "reckon/registers.hpp"
#include "util.hpp"

namespace reckon {
namespace {

using test::topology;

Device small_device() {
  Device dev(topology(4, 5, 3));
  return dev;
}

TEST_SUITE("registers") {
  TEST_CASE("threshold round-trips") {
    Device dev = small_device();
    dev.write_reg(reg::kThreshold, 300);
    CHECK(dev.read_reg(reg::kThreshold) == 300);
    CHECK(dev.config().threshold == 300);
  }

  TEST_CASE("every writable configuration register reads back") {
    Device dev = small_device();
    const std::vector<std::pair<std::uint16_t, std::uint32_t>> writes{
        {reg::kThreshold, 77},       {reg::kLeakShift, 6},
        {reg::kReadoutLeakShift, 9}, {reg::kResetMode, 1},
        {reg::kFracBits, 4},         {reg::kMode, 1},
        {reg::kInitWeightRange, 33}, {reg::kLrShift, 15},
        {reg::kTraceShift, 7},       {reg::kSurrogateWidth, 12},
        {reg::kFeedbackSeedLo, 0xDEADBEEF}, {reg::kFeedbackSeedHi, 0x1234},
        {reg::kFeedbackRange, 50},   {reg::kLearnEnable, 0},
        {reg::kUpdateGranularity, 0}, {reg::kNIn, 9},
        {reg::kNRec, 11},            {reg::kNOut, 4},
    };
    for (auto [addr, value] : writes) {
      dev.write_reg(addr, value);
      CHECK_MESSAGE(dev.read_reg(addr) == value, find_register(addr)->name);
    }
    // Earlier writes survive later ones.
    for (auto [addr, value] : writes) CHECK(dev.read_reg(addr) == value);
    CHECK(dev.learn_params().feedback_seed == 0x00001234DEADBEEFULL);
    CHECK(dev.config().n_rec == 11);
    CHECK(dev.dump_weights(MatrixId::kRecurrent).rows() == 11);
  }

  TEST_CASE("every table entry is addressable by name and address") {
    std::set<std::uint16_t> seen;
    Device dev = small_device();
    for (const RegisterInfo& r : register_table()) {
      CHECK(seen.insert(r.addr).second);
      CHECK(find_register(r.addr)->name == r.name);
      CHECK(find_register(r.name)->addr == r.addr);
      CHECK_NOTHROW(dev.read_reg(r.addr));
    }
    CHECK_FALSE(find_register("no_such_register"));
  }

  TEST_CASE("unknown and read-only addresses are address errors") {
    Device dev = small_device();
    CHECK_THROWS_AS(dev.write_reg(0x7FF, 1), AddressError);
    CHECK_THROWS_AS(dev.read_reg(0x7FF), AddressError);
    CHECK_THROWS_AS(dev.write_reg(reg::kStatusTick, 1), AddressError);
    CHECK_THROWS_AS(dev.write_reg(reg::kStatusSatLo, 1), AddressError);
  }

  TEST_CASE("configuration is locked while a sample is active") {
    Device dev = small_device();
    dev.begin_sample();
    CHECK(dev.read_reg(reg::kStatusSampleActive) == 1);
    CHECK_THROWS_AS(dev.write_reg(reg::kLeakShift, 3), BusyError);
    CHECK_THROWS_AS(dev.write_reg(reg::kWeightData, 3), BusyError);
    CHECK_THROWS_AS(dev.load_weights(MatrixId::kOutput, WeightMatrix(5, 3)), BusyError);
    CHECK(dev.read_reg(reg::kLeakShift) == 4);
    dev.end_sample();
    dev.write_reg(reg::kLeakShift, 3);
    CHECK(dev.read_reg(reg::kLeakShift) == 3);
  }

  TEST_CASE("out-of-range values are rejected and change nothing") {
    Device dev = small_device();
    CHECK_THROWS_AS(dev.write_reg(reg::kNRec, 257), ConfigError);
    CHECK_THROWS_AS(dev.write_reg(reg::kLeakShift, 0), ConfigError);
    CHECK_THROWS_AS(dev.write_reg(reg::kThreshold, 0), ConfigError);
    CHECK_THROWS_AS(dev.write_reg(reg::kResetMode, 2), ConfigError);
    CHECK_THROWS_AS(dev.write_reg(reg::kTraceShift, 0), ConfigError);
    CHECK_THROWS_AS(dev.write_reg(reg::kWeightMatrix, 3), ConfigError);
    CHECK(dev.config() == topology(4, 5, 3));
    CHECK(dev.learn_params() == LearnParams{});
  }

  TEST_CASE("weight commands round-trip every 8-bit value") {
    Device dev = small_device();
    for (std::uint32_t m = 0; m < 3; ++m) {
      dev.write_reg(reg::kWeightMatrix, m);
      dev.write_reg(reg::kWeightRow, 1);
      dev.write_reg(reg::kWeightCol, 2);
      for (int w = -128; w <= 127; ++w) {
        dev.write_reg(reg::kWeightData, static_cast<std::uint32_t>(w));
        REQUIRE(static_cast<std::int32_t>(dev.read_reg(reg::kWeightData)) == w);
      }
    }
    dev.write_reg(reg::kWeightMatrix, 2);
    dev.write_reg(reg::kWeightRow, 4);
    dev.write_reg(reg::kWeightCol, 1);
    dev.write_reg(reg::kWeightData, static_cast<std::uint32_t>(-7));
    CHECK(dev.core().weights().w_out.at(4, 1) == -7);
    CHECK_THROWS_AS(dev.write_reg(reg::kWeightData, 128), ConfigError);
    dev.write_reg(reg::kWeightCol, 3);
    CHECK_THROWS_AS(dev.write_reg(reg::kWeightData, 1), AddressError);
    CHECK_THROWS_AS(dev.read_reg(reg::kWeightData), AddressError);
  }

  TEST_CASE("dense loads dump back identically") {
    Device dev = small_device();
    const WeightMemories w = random_weights(dev.config(), 12);
    for (MatrixId id : {MatrixId::kInput, MatrixId::kRecurrent, MatrixId::kOutput}) {
      dev.load_weights(id, w.matrix(id));
      CHECK(dev.dump_weights(id) == w.matrix(id));
    }
    CHECK(dev.core().weights() == w);
  }

  TEST_CASE("payload dimension mismatches are shape errors") {
    Device dev = small_device();
    CHECK_THROWS_AS(dev.load_weights(MatrixId::kRecurrent, WeightMatrix(4, 5)), ShapeError);
    CHECK_THROWS_AS(dev.load_weights(MatrixId::kInput, WeightMatrix(4, 4)), ShapeError);
    const std::vector<fx::Weight> short_payload(19);
    CHECK_THROWS_AS(dev.load_weights(MatrixId::kInput, 4, 5, short_payload), ShapeError);
  }

  TEST_CASE("status registers follow the run") {
    RunConfig run;
    run.network = topology(24, 16, 2);
    run.network.threshold = 32;
    run.learn.lr_shift = 10;
    Device dev = configure_device(run);
    const Sample s = gen_cue_samples(CueTaskConfig{}, 1)[0];
    dev.run_sample(s);
    CHECK(dev.read_reg(reg::kStatusTick) == s.duration_ticks);
    CHECK(dev.read_reg(reg::kStatusSampleActive) == 0);
    const std::uint64_t skip = dev.read_reg(reg::kStatusSkipLo) |
                               (std::uint64_t{dev.read_reg(reg::kStatusSkipHi)} << 32);
    CHECK(skip == dev.eprop().counters().skipped);
    CHECK(skip > 0);
  }

  TEST_CASE("checkpoint bytes round-trip") {
    const NetworkConfig cfg = topology(7, 9, 3);
    const Checkpoint ckpt = make_checkpoint(cfg, random_weights(cfg, 5));
    const std::string bytes = encode_checkpoint(ckpt);
    CHECK(bytes.size() == 16 + 7 * 9 + 9 * 9 + 9 * 3);
    CHECK(bytes.substr(0, 4) == "RCKW");
    CHECK(decode_checkpoint(bytes) == ckpt);
    CHECK(encode_checkpoint(decode_checkpoint(bytes)) == bytes);

    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), ValidationError);
    CHECK_THROWS_AS(decode_checkpoint("XXXX" + bytes.substr(4)), ValidationError);
    CHECK_THROWS_AS(decode_checkpoint(bytes + "x"), ValidationError);

    test::TempDir dir("ckpt");
    save_checkpoint(dir.path() / "w.rckw", ckpt);
    CHECK(load_checkpoint(dir.path() / "w.rckw") == ckpt);
  }

  TEST_CASE("restoring a checkpoint needs the same topology") {
    Device dev(topology(7, 9, 3));
    const Checkpoint other = make_checkpoint(topology(7, 8, 3), random_weights(topology(7, 8, 3), 1));
    CHECK_THROWS_AS(restore_checkpoint(dev, other), ShapeError);
    const Checkpoint same = make_checkpoint(topology(7, 9, 3), random_weights(topology(7, 9, 3), 1));
    restore_checkpoint(dev, same);
    CHECK(dev.core().weights() == same.weights);
  }

  TEST_CASE("a reloaded checkpoint reproduces every decision") {
    RunConfig run;
    run.data.train_count = 32;
    run.data.test_count = 32;
    run.epochs = 10;
    const Dataset data = build_dataset(run.data);
    const TrainResult trained = train(run, data);

    const std::string bytes = encode_checkpoint(trained.checkpoint);
    Device fresh = configure_device(run);
    restore_checkpoint(fresh, decode_checkpoint(bytes));
    for (MatrixId id : {MatrixId::kInput, MatrixId::kRecurrent, MatrixId::kOutput}) {
      CHECK(fresh.dump_weights(id) == trained.checkpoint.weights.matrix(id));
    }
    const EvalResult ev = evaluate(fresh, data.test, run);
    CHECK(ev.decisions == trained.final_test_decisions);
    CHECK(ev.accuracy == trained.final_test_acc());
    // A second dump after inference is still identical.
    CHECK(encode_checkpoint(make_checkpoint(run.network, fresh.core().weights())) == bytes);
  }
}

}  // namespace
}  // namespace reckon
