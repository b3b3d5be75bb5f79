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

#include <random>
#include <set>

#include "fixtures.hpp"
#include "hec/corpus.hpp"
#include "hec/graph.hpp"

using namespace hec;

namespace {

/// Values that no later operation of the same region reads, plus stores and
/// nested loops, found by a plain use-def scan of the AST.
size_t reference_isolated_count(const std::vector<Operation>& ops) {
  std::set<std::string> used;
  for (const auto& op : ops) {
    for (const auto& o : op.operands) used.insert(o);
    for (const auto& d : op.map.dims) used.insert(d);
    for (const auto& s : op.map.symbols) used.insert(s);
  }
  size_t n = 0;
  for (const auto& op : ops) {
    if (op.kind == OpKind::Store || op.kind == OpKind::For || op.kind == OpKind::If) ++n;
    else if (op.kind != OpKind::Return && !op.result.empty() && !used.count(op.result)) ++n;
  }
  return n;
}

std::string wrap(const std::string& body, const std::string& args = "%a: memref<8xi32>, %b: memref<8xi32>") {
  return "func.func @f(" + args + ") {\n" + body + "  return\n}\n";
}

}  // namespace

TEST(Graph, BaselineTermShape) {
  Term t = fixtures::term("and_xor_baseline");
  ASSERT_EQ(t.op(), "block");
  ASSERT_EQ(t.arity(), 1u);
  Term loop = t.arg(0);
  EXPECT_EQ(loop.op(), "forcontrol");
  EXPECT_EQ(loop.arg(0).str(), "(forvalue 0 101 1 %i0)");
  Term body = loop.arg(1);
  ASSERT_EQ(body.arity(), 1u);
  Term store = body.arg(0);
  EXPECT_EQ(store.op(), "store_i1");
  EXPECT_EQ(store.arg(0).op(), "arith_xori_i1");
  EXPECT_EQ(store.arg(0).arg(0).op(), "arith_andi_i1");
  EXPECT_EQ(store.arg(0).arg(1).str(), "true");
}

TEST(Graph, HoistingUnifiesStructurally) {
  EXPECT_EQ(fixtures::term("and_xor_baseline"), fixtures::term("and_xor_hoisted"));
}

TEST(Graph, EmptyFunction) {
  auto m = parse_module_text("func.func @f() {\n  return\n}\n");
  EXPECT_EQ(graph_to_term(build_graph(m)).str(), "(block)");
}

TEST(Graph, LoneConstantIsIsolated) {
  auto m = parse_module_text("func.func @f() {\n  %c = arith.constant 3 : i32\n  return\n}\n");
  Term t = graph_to_term(build_graph(m));
  ASSERT_EQ(t.arity(), 1u);
  EXPECT_EQ(t.arg(0).str(), "3");
}

TEST(Graph, IsolatedOutputsMatchUseDefScan) {
  const std::string bodies[] = {
      "  affine.for %i = 0 to 8 {\n    %v = affine.load %a[%i] : memref<8xi32>\n"
      "    affine.store %v, %b[%i] : memref<8xi32>\n  }\n",
      "  affine.for %i = 0 to 8 {\n    %v = affine.load %a[%i] : memref<8xi32>\n"
      "    affine.store %v, %b[%i] : memref<8xi32>\n    affine.store %v, %a[%i] : memref<8xi32>\n  }\n",
      "  affine.for %i = 0 to 8 {\n    %v = affine.load %a[%i] : memref<8xi32>\n"
      "    %w = arith.addi %v, %v : i32\n    %u = arith.muli %v, %v : i32\n"
      "    affine.store %u, %b[%i] : memref<8xi32>\n  }\n",
  };
  for (const auto& body : bodies) {
    auto m = parse_module_text(wrap(body));
    const Operation& loop = m.functions[0].body[0];
    DataflowGraph g = build_graph(m);
    Term t = graph_to_term(g);
    EXPECT_EQ(t.arg(0).arg(1).arity(), reference_isolated_count(loop.body)) << body;
  }
}

TEST(Graph, TwoStoresKeepSourceOrder) {
  auto m = parse_module_text(wrap(
      "  affine.for %i = 0 to 8 {\n    %v = affine.load %a[%i] : memref<8xi32>\n"
      "    affine.store %v, %b[%i] : memref<8xi32>\n    affine.store %v, %a[%i] : memref<8xi32>\n  }\n"));
  Term body = graph_to_term(build_graph(m)).arg(0).arg(1);
  ASSERT_EQ(body.arity(), 2u);
  EXPECT_EQ(body.arg(0).arg(1).arg(0).str(), "%arg1");
  EXPECT_EQ(body.arg(1).arg(1).arg(0).str(), "%arg0");
}

TEST(Graph, RoundTripCorpus) {
  for (const char* name : fixtures::kAllFiles) {
    Term t = fixtures::term(name);
    DataflowGraph g = term_to_graph(t);
    EXPECT_EQ(graph_to_term(g), t) << name;
    EXPECT_FALSE(g.report().empty());
    EXPECT_NE(g.dot().find("digraph"), std::string::npos);
  }
}

TEST(Graph, RoundTripRandomKernels) {
  std::mt19937 rng(7);
  using K = LoopTransform::Kind;
  for (int i = 0; i < 100; ++i) {
    Kernel k = static_cast<Kernel>(rng() % 3);
    int64_t n = 3 + rng() % 8;
    K kind = static_cast<K>(rng() % 4);
    int64_t f = kind == K::None ? 1 : 1 + rng() % n;
    std::string src = kernel_source(k, n, {kind, f});
    Term t = graph_to_term(build_graph(parse_module_text(src)));
    EXPECT_EQ(graph_to_term(term_to_graph(t)), t) << src;
  }
}

TEST(Graph, MergedLoopTermBecomesOneLoop) {
  Term t = parse_term(
      "(block (forcontrol (forvalue 0 %arg2 1 %i0) (block (store_i32 (load_i32 (fanin %arg0 "
      "(forvalue 0 %arg2 1 %i0)) entry) (fanin %arg1 (forvalue 0 %arg2 1 %i0)) (forvalue 0 %arg2 1 %i0)))))");
  DataflowGraph g = term_to_graph(t);
  size_t loops = 0;
  for (const auto& v : g.vertices) loops += v.kind == "ForControl";
  EXPECT_EQ(loops, 1u);
  EXPECT_EQ(graph_to_term(g), t);
}

TEST(Graph, MalformedTerm) {
  EXPECT_THROW(term_to_graph(parse_term("(block (forcontrol (forvalue 0 1 1 %i0)))")), MalformedTerm);
  EXPECT_THROW(term_to_graph(parse_term("(block (frobnicate 1 2))")), MalformedTerm);
  EXPECT_THROW(term_to_graph(parse_term("(store_i32 1 2 3)")), MalformedTerm);
}
