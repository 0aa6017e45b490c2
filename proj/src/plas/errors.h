// Copyright 2026 The PLAS Authors.
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

#ifndef PLAS_ERRORS_H_
#define PLAS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace plas {

// Base class for every error raised by the core library. The C API maps each
// subclass onto a status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension or shape mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented domain (bad tau, unknown kind, ...).
class ValueError : public Error {
 public:
  using Error::Error;
};

// A configuration field failed validation. `field` is the dotted path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Non-finite loss, gradient or parameter.
class NumericError : public Error {
 public:
  using Error::Error;
};

// File system or format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plas

#endif  // PLAS_ERRORS_H_
