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

#include "fixtures.hpp"
#include "hec/interpreter.hpp"

using namespace hec;

namespace {

MemoryState one_buffer(Type element, std::vector<int64_t> extents, std::vector<int64_t> data,
                       unsigned position = 0) {
  MemoryState m;
  m.buffers[position] = Buffer{element, std::move(extents), std::move(data)};
  return m;
}

Function parse_fn(const std::string& text) { return parse_module_text(text).functions.at(0); }

}  // namespace

TEST(Interpreter, ShiftCopyFinalState) {
  for (int64_t v : {0, 5, -3}) {
    std::vector<int64_t> init(11, 100);
    init[0] = v;
    auto r = execute(fixtures::function("shift_copy_increment"), {}, one_buffer(Type::integer(32), {11}, init));
    std::vector<int64_t> want(11, v + 1);
    want[0] = v;
    EXPECT_EQ(r.memory.buffers.at(0).data, want);
  }
}

TEST(Interpreter, FusedShiftCopyFinalState) {
  for (int64_t v : {0, 5, -3}) {
    std::vector<int64_t> init(11, 100);
    init[0] = v;
    auto r = execute(fixtures::function("shift_copy_increment_fused"), {},
                     one_buffer(Type::integer(32), {11}, init));
    std::vector<int64_t> want;
    for (int64_t k = 0; k <= 10; ++k) want.push_back(v + k);
    EXPECT_EQ(r.memory.buffers.at(0).data, want);
  }
}

TEST(Interpreter, EmptyBodyLeavesMemory) {
  Function f = parse_fn("func.func @f(%a: memref<4xi8>) {\n  affine.for %i = 0 to 4 {\n  }\n  return\n}\n");
  MemoryState m = one_buffer(Type::integer(8), {4}, {1, 2, 3, 4});
  auto r = execute(f, {}, m);
  EXPECT_EQ(r.memory, m);
  EXPECT_EQ(r.iterations, 4u);
}

TEST(Interpreter, NandAgainstStraightLineEvaluator) {
  Function f = fixtures::function("and_xor_baseline");
  std::mt19937 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    MemoryState m;
    std::vector<int64_t> a(101), b(101);
    for (int i = 0; i < 101; ++i) {
      a[i] = (rng() & 1) ? -1 : 0;
      b[i] = (rng() & 1) ? -1 : 0;
    }
    m.buffers[0] = {Type::integer(1), {101}, a};
    m.buffers[1] = {Type::integer(1), {101}, b};
    m.buffers[2] = {Type::integer(1), {101}, std::vector<int64_t>(101, 0)};
    auto r = execute(f, {}, m);
    for (int i = 0; i < 101; ++i) EXPECT_EQ(r.memory.buffers.at(2).data[i], (a[i] && b[i]) ? 0 : -1);
  }
}

TEST(Interpreter, CounterLoopRunsOnlyFromTen) {
  Function f = fixtures::function("counter_offset_range");
  for (int64_t s = 0; s < 30; ++s) {
    auto r = execute(f, {{1, s}}, one_buffer(Type::integer(32), {1}, {0}));
    EXPECT_EQ(r.memory.buffers.at(0).data[0], std::max<int64_t>(0, s - 10)) << s;
  }
}

TEST(Interpreter, OutOfBounds) {
  Function f = parse_fn("func.func @f(%a: memref<4xi32>) {\n  affine.for %i = 0 to 5 {\n"
                        "    %v = affine.load %a[%i] : memref<4xi32>\n  }\n  return\n}\n");
  try {
    execute(f, {}, one_buffer(Type::integer(32), {4}, {0, 0, 0, 0}));
    FAIL();
  } catch (const OutOfBounds& e) {
    EXPECT_EQ(e.index(), std::vector<int64_t>{4});
  }
}

TEST(Interpreter, StepLimit) {
  InterpOptions o;
  o.max_steps = 10;
  EXPECT_THROW(execute(fixtures::function("and_xor_baseline"), {}, sample_inputs(fixtures::function("and_xor_baseline"), {}, 0).second, o),
               NonTermination);
}

TEST(Interpreter, DivisionByZeroTraps) {
  Function f = parse_fn("func.func @f(%a: memref<1xi32>) {\n  %z = arith.constant 0 : i32\n"
                        "  %v = affine.load %a[0] : memref<1xi32>\n  %q = arith.divsi %v, %z : i32\n"
                        "  affine.store %q, %a[0] : memref<1xi32>\n  return\n}\n");
  EXPECT_THROW(execute(f, {}, one_buffer(Type::integer(32), {1}, {7})), Trap);
}

TEST(Interpreter, ReturnsValues) {
  Function f = parse_fn("func.func @f(%n: index) -> index {\n  return %n : index\n}\n");
  auto r = execute(f, {{0, 42}}, {});
  EXPECT_EQ(r.returns, std::vector<int64_t>{42});
}

TEST(Interpreter, TermEvaluatorAgreesWithInterpreter) {
  for (const char* name : fixtures::kAllFiles) {
    Function f = fixtures::function(name);
    Term t = fixtures::term(name);
    DiffOptions o;
    o.symbol_hi = 32;
    for (int s = 0; s < 20; ++s) {
      auto [syms, mem] = sample_inputs(f, o, s);
      auto x = execute(f, syms, mem);
      auto y = evaluate_term(t, syms, mem);
      EXPECT_FALSE(compare_runs(x, y)) << name << " sample " << s;
    }
  }
}

TEST(Differential, ReflexiveHasNoCounterexample) {
  for (const char* name : fixtures::kAllFiles) {
    Function f = fixtures::function(name);
    EXPECT_FALSE(differential_test(f, f).counterexample) << name;
  }
}

TEST(Differential, UnrolledLoopAgrees) {
  DiffOptions o;
  o.samples = 100;
  auto r = differential_test(fixtures::function("and_xor_baseline"), fixtures::function("and_xor_unrolled"), o);
  EXPECT_FALSE(r.counterexample);
  EXPECT_EQ(r.executed, 100u);
}

TEST(Differential, CaseStudyOneBelowTen) {
  auto r = differential_test(fixtures::function("counter_offset_range"),
                             fixtures::function("counter_offset_range_unrolled"));
  ASSERT_TRUE(r.counterexample);
  EXPECT_LT(r.counterexample->symbols.at(1), 10);
  EXPECT_NE(r.counterexample->iterations_a, r.counterexample->iterations_b);
}

TEST(Differential, PrioritySymbolsTriedFirst) {
  DiffOptions o;
  o.samples = 0;
  o.priority_symbols = {{{1, 7}}};
  auto r = differential_test(fixtures::function("counter_offset_range"),
                             fixtures::function("counter_offset_range_unrolled"), o);
  ASSERT_TRUE(r.counterexample);
  EXPECT_EQ(r.counterexample->symbols.at(1) % 2, 1);
}

TEST(Differential, ShrinksMemoryWitness) {
  auto r = differential_test(fixtures::function("shift_copy_increment"),
                             fixtures::function("shift_copy_increment_fused"));
  ASSERT_TRUE(r.counterexample);
  const auto& d = r.counterexample->divergence;
  EXPECT_EQ(d.kind, Divergence::Kind::Memory);
  EXPECT_EQ(d.value_b - d.value_a, d.index.at(0) - 1);
  EXPECT_NE(r.counterexample->describe(fixtures::function("shift_copy_increment")).find("%arg0["),
            std::string::npos);
}

TEST(Differential, SignatureMismatch) {
  EXPECT_THROW(differential_test(fixtures::function("copy_loop"), fixtures::function("and_xor_baseline")),
               SignatureMismatch);
}
