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

#include "reckon/weights.hpp"

#include "reckon/errors.hpp"

namespace reckon {

std::string_view to_string(MatrixId id) {
  switch (id) {
    case MatrixId::kInput:
      return "input";
    case MatrixId::kRecurrent:
      return "recurrent";
    case MatrixId::kOutput:
      return "output";
  }
  return "unknown";
}

WeightMemories WeightMemories::zeros(const NetworkConfig& cfg) {
  return WeightMemories{WeightMatrix(cfg.n_in, cfg.n_rec),
                        WeightMatrix(cfg.n_rec, cfg.n_rec),
                        WeightMatrix(cfg.n_rec, cfg.n_out)};
}

WeightMatrix& WeightMemories::matrix(MatrixId id) {
  switch (id) {
    case MatrixId::kInput:
      return w_inp;
    case MatrixId::kRecurrent:
      return w_rec;
    case MatrixId::kOutput:
      return w_out;
  }
  throw AddressError("unknown matrix id");
}

const WeightMatrix& WeightMemories::matrix(MatrixId id) const {
  return const_cast<WeightMemories*>(this)->matrix(id);
}

std::uint64_t WeightMemories::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const WeightMatrix* m : {&w_inp, &w_rec, &w_out}) {
    for (fx::Weight w : m->data()) {
      h ^= static_cast<std::uint8_t>(w);
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace reckon
