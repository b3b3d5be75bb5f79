// Copyright 2026 The HEC Authors
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

namespace hec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source position, 1-based.
struct SourceLoc {
  int line = 0;
  int column = 0;

  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(column);
  }
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, SourceLoc loc)
      : Error(loc.str() + ": " + what), loc_(loc) {}
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

class IllegalCharacter : public ParseError {
 public:
  using ParseError::ParseError;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnsupportedOperation : public ParseError {
 public:
  UnsupportedOperation(const std::string& op, SourceLoc loc)
      : ParseError("unsupported operation '" + op + "'", loc), op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

class UnboundOperand : public Error {
 public:
  explicit UnboundOperand(unsigned index)
      : Error("unbound affine operand " + std::to_string(index)),
        index_(index) {}
  unsigned index() const { return index_; }

 private:
  unsigned index_;
};

class CycleDetected : public Error {
 public:
  using Error::Error;
};

class MalformedTerm : public Error {
 public:
  MalformedTerm(const std::string& what, size_t position)
      : Error("malformed term at " + std::to_string(position) + ": " + what),
        position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

class ArityMismatch : public Error {
 public:
  ArityMismatch(const std::string& label, size_t expected, size_t got)
      : Error("label '" + label + "' expects " + std::to_string(expected) +
              " children, got " + std::to_string(got)),
        label_(label) {}
  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

class RuleSyntaxError : public Error {
 public:
  RuleSyntaxError(const std::string& what, size_t line)
      : Error("rule line " + std::to_string(line) + ": " + what), line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

class RuleUnsound : public Error {
 public:
  RuleUnsound(const std::string& rule, const std::string& witness)
      : Error("rule '" + rule + "' is unsound: " + witness), rule_(rule) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

}  // namespace hec
