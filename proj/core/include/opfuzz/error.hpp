// Copyright 2026 The opfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OPFUZZ_ERROR_HPP_
#define OPFUZZ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace opfuzz {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller handed in something malformed: an undeclared variable, a missing
// assignment entry, a gap in a lookup table. Always a programming bug.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Bad user-facing knobs: bounds, bucket counts, unsupported family/rank.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UnsupportedVersionError : public ParseError {
 public:
  using ParseError::ParseError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace opfuzz

#endif  // OPFUZZ_ERROR_HPP_
