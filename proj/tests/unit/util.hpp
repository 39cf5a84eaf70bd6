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

#ifndef RECKON_TESTS_UNIT_UTIL_HPP
#define RECKON_TESTS_UNIT_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "reckon/aer.hpp"
#include "reckon/config.hpp"
#include "reckon/core.hpp"

namespace reckon::test {

inline NetworkConfig topology(int n_in, int n_rec, int n_out) {
  NetworkConfig cfg;
  cfg.n_in = n_in;
  cfg.n_rec = n_rec;
  cfg.n_out = n_out;
  return cfg;
}

// Random input raster: each channel fires with probability `rate` per tick.
inline std::vector<std::vector<int>> random_raster(int n_in, int ticks, double rate,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution fire(rate);
  std::vector<std::vector<int>> raster(static_cast<std::size_t>(ticks));
  for (auto& tick : raster) {
    for (int i = 0; i < n_in; ++i) {
      if (fire(rng)) tick.push_back(i);
    }
  }
  return raster;
}

// Classification sample carrying the raster as input events.
inline Sample raster_sample(const std::vector<std::vector<int>>& raster, int label) {
  std::vector<Event> events;
  for (std::size_t t = 0; t < raster.size(); ++t) {
    for (int i : raster[t]) events.push_back(Event::input(i, static_cast<std::uint32_t>(t)));
  }
  events.push_back(Event::target(static_cast<std::uint32_t>(raster.size()), label));
  events.push_back(Event::end(static_cast<std::uint32_t>(raster.size())));
  return Sample::from_events(std::move(events), TaskMode::kClassification);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("reckon-test-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace reckon::test

#endif  // RECKON_TESTS_UNIT_UTIL_HPP
