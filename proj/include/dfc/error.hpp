// Copyright 2026 The dfcompat Authors. All Rights Reserved.
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

namespace dfc {

enum class ErrorKind {
  SyntaxError,
  UnknownBlockKind,
  DuplicateName,
  TypeAnnotationMissing,
  ArityError,
  InvalidParameter,
  AlgebraicLoop,
  TypeMismatch,
  UnconnectedInput,
  DataStoreOrder,
  UnmappedPort,
  ConflictingOverride,
  ArithmeticOverflow,
  StateOutOfDomain,
  PathExplosion,
  DomainTooLarge,
  StateBudgetExceeded,
  IterationCapExceeded,
  CsvSchema,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure the library reports. The kind is the
/// stable, testable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse errors keep the source position.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, const std::string& message)
      : Error(ErrorKind::SyntaxError,
              std::to_string(line) + ":" + std::to_string(col) + ": " + message),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

}  // namespace dfc
