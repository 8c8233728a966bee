// Copyright 2026 The amm-align Authors
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

namespace amm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A precondition on a scalar or count argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A contrastive batch has fewer than two pairs, so no negatives exist.
class DegenerateBatchError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// A NaN or infinity showed up where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Loaded data is well-formed on disk but violates a content invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file has the wrong magic, version, or layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed (missing, unwritable, truncated).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace amm
