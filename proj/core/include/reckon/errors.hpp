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

#ifndef RECKON_ERRORS_HPP
#define RECKON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace reckon {

// Base of every error raised by the emulator. Callers that only care about
// "something was wrong with the input" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid NetworkConfig / LearnParams / task configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Address-event outside the legal range, or a malformed control event.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Timestamps decreasing inside a sample.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// Missing or misplaced end-of-sample / target events.
class FramingError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid samples handed to a serializer, or malformed files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A sample did not terminate within its tick budget.
class RunawayError : public Error {
 public:
  using Error::Error;
};

// Unknown register address or write to a read-only register.
class AddressError : public Error {
 public:
  using Error::Error;
};

// Configuration write while a sample is active.
class BusyError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between payloads, checkpoints, datasets and topology.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Dataset split impossible with the requested fraction or class counts.
class SplitError : public Error {
 public:
  using Error::Error;
};

// Empty or otherwise unusable input to a workflow.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace reckon

#endif  // RECKON_ERRORS_HPP
