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

#include <string>
#include <string_view>
#include <vector>

#include "hec/ast.hpp"

namespace hec {

enum class TokenKind {
  Identifier,  // affine.for, to, i32, floordiv
  SsaId,       // %arg0
  SymbolRef,   // @kernel
  HashRef,     // #map1
  Integer,
  Punct,       // ( ) { } [ ] < > , : = + - * ? -> >= ==
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  SourceLoc loc;

  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

/// Splits MLIR text into tokens, dropping whitespace and `//` comments.
/// The result carries no End token. Throws IllegalCharacter.
std::vector<Token> tokenize(std::string_view text);

/// Throws SyntaxError or UnsupportedOperation.
ProgramModule parse_module(const std::vector<Token>& tokens);
ProgramModule parse_module_text(std::string_view text);
/// Reads and parses a file; throws Error when it cannot be read.
ProgramModule parse_module_file(const std::string& path);

/// MLIR text that parses back to an equal module.
std::string print_module(const ProgramModule& module);

}  // namespace hec
