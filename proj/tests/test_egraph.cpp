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

#include <numeric>
#include <random>
#include <set>

#include "egraph_props.hpp"
#include "fixtures.hpp"
#include "hec/egraph.hpp"
#include "hec/static_rules.hpp"

using namespace hec;

namespace {

using egraph_props::class_has;
using egraph_props::congruent;
using egraph_props::random_term;

size_t distinct_subterms(const Term& t) {
  size_t n = 0;
  t.walk([&](const Term&) {
    ++n;
    return true;
  });
  return n;
}

}  // namespace

TEST(EGraph, HashconsDedup) {
  EGraph g;
  EClassId a = g.insert("0", {}, true);
  EClassId b = g.insert("0", {}, true);
  EXPECT_EQ(a, b);
  EXPECT_EQ(g.num_classes(), 1u);
}

TEST(EGraph, BaselineClassCountIsDistinctSubterms) {
  Term t = fixtures::term("and_xor_baseline");
  EGraph g;
  g.add(t);
  EXPECT_EQ(g.num_classes(), distinct_subterms(t));
  EXPECT_EQ(g.num_nodes(), distinct_subterms(t));
}

TEST(EGraph, AndXorInitialClasses) {
  EGraph g;
  g.add(parse_term("(mul (pow (exp x) 2) (exp 2))"));
  EXPECT_EQ(g.num_classes(), 6u);
}

TEST(EGraph, AndXorSaturation) {
  EGraph g;
  EClassId root = g.add(parse_term("(mul (pow (exp x) 2) (exp 2))"));
  std::vector<RewriteRule> rules = {
      {"pow-exp", parse_term("(pow (exp ?a) ?b)"), parse_term("(exp (mul ?a ?b))"), {}, {}},
      {"mul-exp", parse_term("(mul (exp ?a) (exp ?b))"), parse_term("(exp (add ?a ?b))"), {}, {}}};
  g.saturate(rules, {});
  auto target = g.lookup(parse_term("(exp (add (mul x 2) 2))"));
  ASSERT_TRUE(target);
  EXPECT_TRUE(g.in_same_class(*target, root));
  auto mid = g.lookup(parse_term("(exp (mul x 2))"));
  auto pow = g.lookup(parse_term("(pow (exp x) 2)"));
  ASSERT_TRUE(mid && pow);
  EXPECT_TRUE(g.in_same_class(*mid, *pow));
}

TEST(EGraph, EmptyRulesetDoesNothing) {
  EGraph g;
  g.add(parse_term("(f a b)"));
  size_t n = g.num_nodes();
  auto r = g.saturate({}, {});
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(g.num_nodes(), n);
}

TEST(EGraph, CommutativityClosure) {
  EGraph g;
  g.add(parse_term("(plus a b)"));
  size_t n = g.num_nodes();
  auto r = g.saturate({{"comm", parse_term("(plus ?a ?b)"), parse_term("(plus ?b ?a)"), {}, {}}}, {});
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(g.num_nodes(), n + 1);
  EXPECT_EQ(r.stop, StopReason::Saturated);
}

TEST(EGraph, SelfUnionIsNoOp) {
  EGraph g;
  EClassId a = g.add(parse_term("(f a)"));
  size_t n = g.num_classes();
  g.merge(a, a);
  g.rebuild();
  EXPECT_EQ(g.num_classes(), n);
}

TEST(EGraph, OneStepCongruence) {
  EGraph g;
  EClassId fa = g.add(parse_term("(f a)"));
  EClassId fb = g.add(parse_term("(f b)"));
  g.merge(*g.lookup(Term::atom("a")), *g.lookup(Term::atom("b")));
  g.rebuild();
  EXPECT_TRUE(g.in_same_class(fa, fb));
}

TEST(EGraph, TransitiveCongruence) {
  EGraph g;
  EClassId a = g.add(Term::atom("a"));
  EClassId b = g.add(Term::atom("b"));
  EClassId c = g.add(parse_term("(g a)"));
  EClassId d = g.add(parse_term("(g b)"));
  EClassId hc = g.add(parse_term("(h (g a))"));
  EClassId hd = g.add(parse_term("(h (g b))"));
  g.merge(a, b);
  g.rebuild();
  EXPECT_TRUE(g.in_same_class(c, d));
  EXPECT_TRUE(g.in_same_class(hc, hd));
}

TEST(EGraph, CleanRebuildKeepsCounters) {
  EGraph g;
  g.add(parse_term("(f (g a) b)"));
  size_t c = g.num_classes(), n = g.num_nodes();
  EXPECT_FALSE(g.dirty());
  g.rebuild();
  EXPECT_EQ(g.num_classes(), c);
  EXPECT_EQ(g.num_nodes(), n);
}

TEST(EGraph, UnionsMatchDisjointSetOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 20;
    EGraph g;
    std::vector<EClassId> ids;
    for (size_t i = 0; i < n; ++i) ids.push_back(g.add(Term::atom("x" + std::to_string(i))));
    std::vector<size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<size_t(size_t)> root = [&](size_t x) { return parent[x] == x ? x : parent[x] = root(parent[x]); };
    size_t effective = 0;
    for (int u = 0; u < 15; ++u) {
      size_t x = rng() % n, y = rng() % n;
      size_t before = g.num_classes();
      g.merge(ids[x], ids[y]);
      g.rebuild();
      EXPECT_LE(g.num_classes(), before);
      if (root(x) != root(y)) {
        parent[root(x)] = root(y);
        ++effective;
      }
      EXPECT_EQ(g.num_classes(), n - effective);
    }
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) EXPECT_EQ(g.in_same_class(ids[i], ids[j]), root(i) == root(j));
  }
}

TEST(EGraph, RandomGraphsStayCongruentAndMatchBruteForce) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    EXPECT_TRUE(egraph_props::hashcons_dedup(rng)) << "trial " << trial;
    EXPECT_EQ(egraph_props::check_random_graph(rng), "") << "trial " << trial;
  }
}

TEST(EGraph, XorTruePatternOnBaseline) {
  EGraph g;
  g.add(fixtures::term("and_xor_baseline"));
  auto ms = g.ematch(parse_term("(arith_xori_i1 ?a true)"));
  ASSERT_EQ(ms.size(), 1u);
  const auto& nodes = g.nodes(ms[0].subst.at("a"));
  ASSERT_FALSE(nodes.empty());
  EXPECT_EQ(g.symbol_name(nodes[0].op), "arith_andi_i1");
}

TEST(EGraph, GroundPatternMatchesItsClass) {
  EGraph g;
  Term t = parse_term("(f (g a) b)");
  EClassId id = g.add(t);
  g.add(parse_term("(f b b)"));
  auto ms = g.ematch(t);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(g.find(ms[0].root), g.find(id));
}

TEST(EGraph, DistinctConstantsStayApart) {
  EGraph g;
  EClassId a = g.add(Term::integer(1));
  EClassId b = g.add(Term::integer(2));
  EXPECT_FALSE(g.in_same_class(a, b));
}

TEST(EGraph, ArityMismatch) {
  EGraph g;
  EClassId a = g.add(Term::atom("a"));
  EXPECT_THROW(g.insert("forcontrol", {a}), ArityMismatch);
  EXPECT_THROW(g.add(parse_term("(store_i32 a a)")), ArityMismatch);
}

TEST(EGraph, ConstantFolding) {
  EGraph g;
  g.set_folder(fold_constant);
  EClassId sum = g.add(parse_term("(arith_addi_i8 100 100)"));
  ASSERT_TRUE(g.constant_of(sum));
  EXPECT_EQ(g.constant_of(sum)->str(), "-56");
  EXPECT_FALSE(g.inconsistent());
}

TEST(EGraph, NodeLimitStops) {
  EGraph g;
  g.add(parse_term("(plus a b)"));
  SaturationLimits lim;
  lim.max_enodes = 4;
  auto r = g.saturate({{"grow", parse_term("?a"), parse_term("(wrap ?a)"), {}, {}}}, lim);
  EXPECT_EQ(r.stop, StopReason::NodeLimit);
}

TEST(EGraph, ExtractPrefersSmallTrees) {
  EGraph g;
  EClassId big = g.add(parse_term("(f (g (g a)) b)"));
  EClassId small = g.add(Term::atom("c"));
  g.merge(big, small);
  g.rebuild();
  EXPECT_EQ(g.extract(big).str(), "c");
  EXPECT_NE(g.dot().find("style=dotted"), std::string::npos);
}

TEST(EGraph, ConstructFromGraph) {
  EGraph g;
  EClassId root = construct_from_graph(g, build_graph(fixtures::function("copy_loop_nested_unroll")));
  size_t loops = 0;
  for (const ENode& n : g.nodes(root)) {
    for (EClassId c : n.children)
      for (const ENode& m : g.nodes(c)) loops += g.symbol_name(m.op) == "forcontrol";
  }
  EXPECT_EQ(loops, 4u);
}

TEST(EGraph, ExtractsTermsWithHugeTreeSize) {
  // Shared chain whose tree size is 2^100.
  Term t = Term::atom("a");
  for (int i = 0; i < 100; ++i) t = Term::make("f", {t, t});
  EGraph g;
  EClassId c = g.add(t);
  EXPECT_EQ(g.num_classes(), 101u);
  EXPECT_EQ(g.extract(c), t);
}
