// Copyright 2026 The hybridse Authors
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

#ifndef HYBRIDSE_ERROR_HPP_
#define HYBRIDSE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hybridse {

// Root of every exception thrown by the library. The subclasses map onto the
// error kinds callers are expected to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unsupported sample rate, non-integral frame sizes, bad config values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A stage received audio at a rate it does not accept.
class RateError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Two inputs that must share frame grids (or rates) do not.
class AlignmentError : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

// Non-finite samples or parameters.
class DataError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Silent references, silent noise, and similar inputs for which the requested
// quantity is undefined.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Malformed WAV files or tensor archives.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hybridse

#endif  // HYBRIDSE_ERROR_HPP_
