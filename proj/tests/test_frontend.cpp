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

#include <gtest/gtest.h>

#include <regex>

#include "fixtures.hpp"
#include "hec/affine.hpp"
#include "hec/frontend.hpp"

using namespace hec;

namespace {

/// One-pass reference lexer built on a regex alternation.
std::vector<std::string> reference_lex(const std::string& text) {
  static const std::regex re(
      R"(//[^\n]*|\s+|[%@#][A-Za-z0-9_.$]+|[A-Za-z_][A-Za-z0-9_.$]*|0x[0-9a-fA-F]+|[0-9]+|->|>=|==|[(){}\[\]<>,:=+\-*?])");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    std::string s = it->str();
    if (s.rfind("//", 0) == 0 || std::isspace(static_cast<unsigned char>(s[0]))) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Tokenize, LoopHeader) {
  auto toks = tokenize("affine.for %arg1 = 0 to 101 {");
  std::vector<std::pair<TokenKind, std::string>> want = {
      {TokenKind::Identifier, "affine.for"}, {TokenKind::SsaId, "%arg1"}, {TokenKind::Punct, "="},
      {TokenKind::Integer, "0"},            {TokenKind::Identifier, "to"}, {TokenKind::Integer, "101"},
      {TokenKind::Punct, "{"}};
  ASSERT_EQ(toks.size(), want.size());
  for (size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(toks[i].kind, want[i].first);
    EXPECT_EQ(toks[i].text, want[i].second);
  }
}

TEST(Tokenize, Empty) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, AgreesWithReferenceLexer) {
  for (const char* name : fixtures::kAllFiles) {
    std::string text = fixtures::corpus_text(name);
    auto toks = tokenize(text);
    auto ref = reference_lex(text);
    ASSERT_EQ(toks.size(), ref.size()) << name;
    for (size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(toks[i].text, ref[i]) << name << " token " << i;
  }
}

TEST(Tokenize, IllegalCharacterHasLocation) {
  try {
    tokenize("func.func @f() {\n  ~\n}");
    FAIL();
  } catch (const IllegalCharacter& e) {
    EXPECT_EQ(e.loc().line, 2);
    EXPECT_EQ(e.loc().column, 3);
  }
}

TEST(Parse, BaselineShape) {
  auto m = fixtures::module("and_xor_baseline");
  ASSERT_EQ(m.functions.size(), 1u);
  const Function& f = m.functions[0];
  std::vector<const Operation*> loops;
  for (const auto& op : f.body)
    if (op.kind == OpKind::For) loops.push_back(&op);
  ASSERT_EQ(loops.size(), 1u);
  std::vector<OpKind> kinds;
  for (const auto& op : loops[0]->body) kinds.push_back(op.kind);
  EXPECT_EQ(kinds, (std::vector<OpKind>{OpKind::Load, OpKind::Load, OpKind::Binary, OpKind::Binary,
                                        OpKind::Store}));
  EXPECT_EQ(loops[0]->body[2].name, "arith.andi");
  EXPECT_EQ(loops[0]->body[3].name, "arith.xori");
}

TEST(Parse, RemainderBugFileMapsAndLoops) {
  auto m = fixtures::module("counter_offset_range_unrolled");
  EXPECT_EQ(m.maps.size(), 4u);
  size_t loops = 0;
  for (const auto& op : m.functions[0].body) loops += op.kind == OpKind::For;
  EXPECT_EQ(loops, 2u);
}

TEST(Parse, UnsupportedOperation) {
  const char* text = R"(func.func @f(%arg0: index) {
  scf.while {
  }
  return
})";
  EXPECT_THROW(parse_module_text(text), UnsupportedOperation);
}

TEST(Parse, SyntaxErrors) {
  EXPECT_THROW(parse_module_text("func.func @f( {"), SyntaxError);
  EXPECT_THROW(parse_module_text("func.func @f() {\n  %a = arith.addi %x, %x : i32\n  return\n}"),
               SyntaxError);
  EXPECT_THROW(parse_module_text("func.func @f(%a: memref<4xi32>) {\n  affine.for %i = 0 to 4 step 0 {\n  }\n  return\n}"),
               SyntaxError);
}

TEST(Parse, SiblingRegionsMayReuseNames) {
  const char* text = R"(func.func @f(%a: memref<4xi32>) {
  affine.for %i = 0 to 4 {
    %v = affine.load %a[%i] : memref<4xi32>
    affine.store %v, %a[%i] : memref<4xi32>
  }
  affine.for %i = 0 to 4 {
    %v = affine.load %a[%i] : memref<4xi32>
    affine.store %v, %a[%i] : memref<4xi32>
  }
  return
})";
  EXPECT_NO_THROW(parse_module_text(text));
}

TEST(Parse, PrintRoundTrip) {
  for (const char* name : fixtures::kAllFiles) {
    auto m = fixtures::module(name);
    auto again = parse_module_text(print_module(m));
    EXPECT_EQ(m, again) << name;
  }
}

TEST(Affine, EvaluatesMaps) {
  auto d0 = AffineExpr::dim(0);
  auto s0 = AffineExpr::symbol(0);
  int64_t dims[] = {99};
  int64_t syms[] = {5};
  EXPECT_EQ(eval_affine_expr(d0 + AffineExpr::constant(1), dims, {}), 100);
  EXPECT_EQ(eval_affine_expr(AffineExpr::floor_div(s0, 2) * AffineExpr::constant(2), {}, syms), 4);
  int64_t at100[] = {100};
  EXPECT_EQ(eval_affine_expr(AffineExpr::min({d0 + AffineExpr::constant(3), AffineExpr::constant(101)}),
                             at100, {}),
            101);
}

TEST(Affine, FloorSemanticsOnNegatives) {
  EXPECT_EQ(floor_div(-7, 2), -4);
  EXPECT_EQ(ceil_div(-7, 2), -3);
  EXPECT_EQ(floor_mod(-7, 2), 1);
  EXPECT_EQ(ceil_div(7, 2), 4);
}

TEST(Affine, UnboundOperand) {
  int64_t dims[] = {1};
  EXPECT_THROW(eval_affine_expr(AffineExpr::dim(2), dims, {}), UnboundOperand);
}

TEST(Arith, WrapsAndTraps) {
  EXPECT_EQ(eval_arith("addi", 127, 1, 8), -128);
  EXPECT_EQ(eval_arith("muli", 16, 16, 8), 0);
  EXPECT_EQ(eval_arith("divsi", 7, 0, 32), std::nullopt);
  EXPECT_EQ(eval_arith("shli", 1, 8, 8), std::nullopt);
  EXPECT_EQ(eval_arith("shrsi", -8, 1, 8), -4);
  EXPECT_EQ(eval_arith("xori", -1, 0, 1), -1);
}
