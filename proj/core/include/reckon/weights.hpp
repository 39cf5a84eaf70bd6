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

#ifndef RECKON_WEIGHTS_HPP
#define RECKON_WEIGHTS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "reckon/config.hpp"
#include "reckon/fixed_point.hpp"

namespace reckon {

enum class MatrixId : std::uint8_t { kInput = 0, kRecurrent = 1, kOutput = 2 };

std::string_view to_string(MatrixId id);

// Dense row-major matrix of signed 8-bit weights.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  fx::Weight at(int r, int c) const { return data_[index(r, c)]; }
  fx::Weight& at(int r, int c) { return data_[index(r, c)]; }

  std::span<const fx::Weight> row(int r) const {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<fx::Weight> row(int r) {
    return {data_.data() + index(r, 0), static_cast<std::size_t>(cols_)};
  }

  std::span<const fx::Weight> data() const { return data_; }
  std::span<fx::Weight> data() { return data_; }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<fx::Weight> data_;
};

// The three on-chip weight memories.
struct WeightMemories {
  WeightMatrix w_inp;  // n_in x n_rec
  WeightMatrix w_rec;  // n_rec x n_rec
  WeightMatrix w_out;  // n_rec x n_out

  static WeightMemories zeros(const NetworkConfig& cfg);

  WeightMatrix& matrix(MatrixId id);
  const WeightMatrix& matrix(MatrixId id) const;

  std::size_t synapse_count() const {
    return w_inp.size() + w_rec.size() + w_out.size();
  }

  // FNV-1a over all three matrices, in input/recurrent/output order.
  std::uint64_t checksum() const;

  friend bool operator==(const WeightMemories&, const WeightMemories&) = default;
};

}  // namespace reckon

#endif  // RECKON_WEIGHTS_HPP
