/* Copyright 2026 The probrec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PROBREC_ERRORS_HPP_
#define PROBREC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace probrec {

// Base of every error raised by the library. Callers that only need to
// distinguish "bad input" from "bug" can catch this one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PROBREC_DEFINE_ERROR(Name)                           \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what) : Error(what) {}  \
  }

PROBREC_DEFINE_ERROR(MassOverflow);
PROBREC_DEFINE_ERROR(KeySpaceMismatch);
PROBREC_DEFINE_ERROR(InvalidProbability);
PROBREC_DEFINE_ERROR(ArityMismatch);
PROBREC_DEFINE_ERROR(UnknownName);
PROBREC_DEFINE_ERROR(AlphabetMismatch);
PROBREC_DEFINE_ERROR(IndexOutOfRange);
PROBREC_DEFINE_ERROR(DecodeError);
PROBREC_DEFINE_ERROR(FinalConfiguration);
PROBREC_DEFINE_ERROR(NodeNotExplored);
PROBREC_DEFINE_ERROR(OutOfRange);
PROBREC_DEFINE_ERROR(NotTiered);
PROBREC_DEFINE_ERROR(NotCompilable);
PROBREC_DEFINE_ERROR(InvalidMachine);
PROBREC_DEFINE_ERROR(IncompatibleInvocation);
PROBREC_DEFINE_ERROR(OracleExhausted);

#undef PROBREC_DEFINE_ERROR

// Text position is 1-based; `expected` lists the token classes that would
// have been accepted at that point.
class ParseError : public Error {
 public:
  ParseError(int line, int column, std::string message, std::string expected)
      : Error(Format(line, column, message, expected)),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  static std::string Format(int line, int column, const std::string& message,
                            const std::string& expected) {
    std::string out = std::to_string(line) + ":" + std::to_string(column) +
                      ": " + message;
    if (!expected.empty()) out += " (expected " + expected + ")";
    return out;
  }

  int line_;
  int column_;
  std::string expected_;
};

}  // namespace probrec

#endif  // PROBREC_ERRORS_HPP_
