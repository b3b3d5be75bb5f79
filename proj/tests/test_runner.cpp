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

#include <json.hpp>

#include "fixtures.hpp"
#include "hec/corpus.hpp"
#include "hec/runner.hpp"

using namespace hec;

namespace {

FunctionReport run(const std::string& a, const std::string& b, RunnerConfig c = {}) {
  return verify_functions(fixtures::function(a), fixtures::function(b), c);
}

size_t count_label(const EGraph& g, const std::string& label) {
  size_t n = 0;
  for (EClassId c : g.classes())
    for (const ENode& node : g.nodes(c)) n += g.symbol_name(node.op) == label;
  return n;
}

/// Loops over [0,16) step 8, [16,24) step 4, [24,28) step 2, [28,29) step 1
/// with bodies replicated to match, so every adjacent pair is an unrolling.
std::string staircase() {
  std::string s = "#o1 = affine_map<(d0) -> (d0 + 1)>\n";
  for (int c = 2; c < 8; ++c) s += "#o" + std::to_string(c) + " = affine_map<(d0) -> (d0 + " + std::to_string(c) + ")>\n";
  s += "func.func @f(%a: memref<32xi32>, %b: memref<32xi32>) {\n";
  const int bounds[][3] = {{0, 16, 8}, {16, 24, 4}, {24, 28, 2}, {28, 29, 1}};
  int id = 0;
  for (const auto& b : bounds) {
    s += "  affine.for %i = " + std::to_string(b[0]) + " to " + std::to_string(b[1]) + " step " + std::to_string(b[2]) + " {\n";
    for (int c = 0; c < b[2]; ++c) {
      std::string idx = "%i";
      if (c) {
        idx = "%x" + std::to_string(id++);
        s += "    " + idx + " = affine.apply #o" + std::to_string(c) + "(%i)\n";
      }
      std::string v = "%v" + std::to_string(id++);
      s += "    " + v + " = affine.load %a[" + idx + "] : memref<32xi32>\n";
      s += "    affine.store " + v + ", %b[" + idx + "] : memref<32xi32>\n";
    }
    s += "  }\n";
  }
  return s + "  return\n}\n";
}

const char* kRolled = R"(func.func @f(%a: memref<32xi32>, %b: memref<32xi32>) {
  affine.for %i = 0 to 29 {
    %v = affine.load %a[%i] : memref<32xi32>
    affine.store %v, %b[%i] : memref<32xi32>
  }
  return
})";

}  // namespace

TEST(Runner, HoistingNeedsNoDynamicRules) {
  auto r = run("and_xor_baseline", "and_xor_hoisted");
  EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent);
  EXPECT_EQ(r.dynamic_rules, 0u);
  EXPECT_EQ(r.iterations, 0u);
}

TEST(Runner, DeMorganByStaticRules) {
  auto r = run("and_xor_baseline", "and_xor_demorgan");
  EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent);
  EXPECT_EQ(r.dynamic_rules, 0u);
  EXPECT_GT(r.static_iterations, 0u);
}

TEST(Runner, NestedUnrollTakesTwoRounds) {
  auto r = run("copy_loop", "copy_loop_nested_unroll");
  EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent);
  EXPECT_EQ(r.iterations, 2u);
  ASSERT_EQ(r.rounds.size(), 2u);
  EXPECT_EQ(r.rounds[0].new_rules, 2u);
  EXPECT_EQ(r.rounds[1].new_rules, 1u);
}

TEST(Runner, LoopBoundaryBugFound) {
  auto r = run("counter_offset_range", "counter_offset_range_unrolled");
  ASSERT_EQ(r.verdict.kind, VerdictKind::NotEquivalent);
  ASSERT_TRUE(r.verdict.witness);
  EXPECT_LT(r.verdict.witness->symbols.at(1), 10);
}

TEST(Runner, IdenticalProgramsNeedNoRounds) {
  auto r = run("copy_loop_nested_unroll", "copy_loop_nested_unroll");
  EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.static_iterations, 0u);
}

TEST(Runner, GemmUnrollEightOneRound) {
  auto a = parse_module_text(kernel_source(Kernel::Gemm, 10));
  auto b = parse_module_text(kernel_source(Kernel::Gemm, 10, {LoopTransform::Kind::Unroll, 8}));
  auto r = verify_functions(a.functions[0], b.functions[0]);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_GE(r.dynamic_rules, 1u);
  ASSERT_FALSE(r.rule_log.empty());
  EXPECT_EQ(r.rule_log[0].kind, TransformKind::Unrolling);
  // The interpreter agrees on the fixture.
  DiffOptions o;
  o.samples = 20;
  EXPECT_FALSE(differential_test(a.functions[0], b.functions[0], o).counterexample);
}

TEST(Runner, CombineNodePerAdjacentPair) {
  Function a = parse_module_text(kRolled).functions[0];
  Function b = parse_module_text(staircase()).functions[0];
  EGraph g;
  g.set_folder(fold_constant);
  EClassId ra = g.add(graph_to_term(build_graph(a)));
  EClassId rb = g.add(graph_to_term(build_graph(b)));
  RunnerConfig c;
  c.max_rounds = 1;
  auto fix = iteration_fixpoint(g, ra, rb, {}, c);
  ASSERT_EQ(fix.new_rule_counts.size(), 1u);
  EXPECT_EQ(fix.new_rule_counts[0], 3u);
  // Four loops, three adjacent pairs: one combine per pair plus the block
  // alternative's non-overlapping pairs.
  EXPECT_GE(count_label(g, "combine"), 3u);
  auto full = verify_functions(a, b);
  EXPECT_EQ(full.verdict.kind, VerdictKind::Equivalent);
}

TEST(Runner, InsertCombineOfSameClass) {
  EGraph g;
  EClassId x = g.add(fixtures::term("copy_loop").arg(0));
  size_t before = g.num_classes();
  EClassId c = insert_combine(g, x, x);
  EXPECT_EQ(g.num_classes(), before + 1);
  EXPECT_NE(c, x);
  EXPECT_EQ(g.symbol_name(g.nodes(c)[0].op), "combine");
}

TEST(Runner, CombineBlockRedirectsTokens) {
  Term l1 = parse_term("(forcontrol (forvalue 0 4 2 %i0) (block))");
  Term l2 = parse_term("(forcontrol (forvalue 4 5 1 %i0) (block))");
  Term after = Term::make("load_i32", {parse_term("(fanin %arg0 0)"), l2});
  Term block = Term::make("block", {l1, l2, after});
  Term out = combine_block(block, {{l1, l2}});
  ASSERT_EQ(out.arity(), 2u);
  EXPECT_EQ(out.arg(0), Term::make("combine", {l1, l2}));
  EXPECT_EQ(out.arg(1).arg(1), out.arg(0));
}

TEST(Runner, UnprovableEquivalenceIsUnknown) {
  const char* reversed = R"(#r = affine_map<(d0) -> (28 - d0)>
func.func @f(%a: memref<32xi32>, %b: memref<32xi32>) {
  affine.for %i = 0 to 29 {
    %j = affine.apply #r(%i)
    %v = affine.load %a[%j] : memref<32xi32>
    affine.store %v, %b[%j] : memref<32xi32>
  }
  return
})";
  auto r = verify_functions(parse_module_text(kRolled).functions[0], parse_module_text(reversed).functions[0]);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Unknown);
  EXPECT_EQ(r.verdict.reason, "no-new-rules");
}

TEST(Runner, TinyNodeLimitIsUnknown) {
  RunnerConfig c;
  c.max_enodes = 10;
  auto r = run("and_xor_baseline", "and_xor_unrolled", c);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Unknown);
  EXPECT_EQ(r.verdict.reason, "limits");
}

TEST(Runner, CountersMonotone) {
  auto r = run("copy_loop", "copy_loop_nested_unroll");
  size_t rules = 0;
  for (const auto& s : r.rounds) {
    rules += s.new_rules;
    EXPECT_GT(s.new_rules, 0u);
  }
  EXPECT_EQ(rules, r.dynamic_rules);
  size_t last_round = 0;
  for (const auto& e : r.rule_log) {
    EXPECT_GE(e.round, last_round);
    last_round = e.round;
  }
}

TEST(Runner, ReflexiveAndSymmetric) {
  for (const char* name : fixtures::kAllFiles) {
    auto r = run(name, name);
    EXPECT_EQ(r.verdict.kind, VerdictKind::Equivalent) << name;
    EXPECT_EQ(r.dynamic_rules, 0u) << name;
  }
  const std::pair<const char*, const char*> pairs[] = {
      {"and_xor_baseline", "and_xor_tiled"}, {"and_xor_baseline", "and_xor_unrolled"},
      {"copy_loop", "copy_loop_nested_unroll"}, {"counter_offset_range", "counter_offset_range_unrolled"},
      {"shift_copy_increment", "shift_copy_increment_fused"}};
  for (const auto& [a, b] : pairs) EXPECT_EQ(run(a, b).verdict.kind, run(b, a).verdict.kind) << a << " " << b;
}

TEST(Runner, ReportJson) {
  auto rep = verify(fixtures::corpus_path("shift_copy_increment"), fixtures::corpus_path("shift_copy_increment_fused"));
  auto j = nlohmann::json::parse(rep.to_json());
  for (const char* key : {"verdict", "iterations", "dynamic_rules", "e_classes", "e_nodes", "wall_time_ms", "witness", "rule_log"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["verdict"], "not-equivalent");
  std::vector<int64_t> final_a = j["witness"]["final_a"];
  std::vector<int64_t> final_b = j["witness"]["final_b"];
  ASSERT_EQ(final_a.size(), 11u);
  for (size_t k = 1; k < 11; ++k) {
    EXPECT_EQ(final_a[k], final_a[0] + 1);
    EXPECT_EQ(final_b[k], final_b[0] + static_cast<int64_t>(k));
  }
  EXPECT_NE(rep.summary().find("not-equivalent"), std::string::npos);
}

TEST(Runner, FunctionMismatch) {
  auto a = parse_module_text("func.func @f() {\n  return\n}\nfunc.func @g() {\n  return\n}\n");
  auto b = parse_module_text("func.func @f() {\n  return\n}\nfunc.func @h() {\n  return\n}\n");
  EXPECT_THROW(verify_modules(a, b), FunctionMismatch);
  auto c = parse_module_text("func.func @g() {\n  return\n}\nfunc.func @f() {\n  return\n}\n");
  EXPECT_EQ(verify_modules(a, c).verdict.kind, VerdictKind::Equivalent);
}

TEST(Runner, ModuleVerdictIsWorstFunction) {
  std::string a = fixtures::corpus_text("counter_offset_range");
  std::string b = fixtures::corpus_text("counter_offset_range_unrolled");
  auto extra = std::string("func.func @other() {\n  return\n}\n");
  auto r = verify_modules(parse_module_text(a + extra), parse_module_text(b + extra));
  EXPECT_EQ(r.verdict.kind, VerdictKind::NotEquivalent);
  EXPECT_EQ(r.functions.size(), 2u);
}
