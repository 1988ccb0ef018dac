// Copyright 2026 The ELG Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace elg {

// Root of all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input data is malformed, inconsistent or insufficient.
class DataError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public DataError {
 public:
  using DataError::DataError;
};

// Serialized artifact failed integrity or version checks.
class CorruptionError : public DataError {
 public:
  using DataError::DataError;
};

// Bad configuration: malformed regex, duplicate priority, bad thresholds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Numeric failure during model fitting.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace elg
